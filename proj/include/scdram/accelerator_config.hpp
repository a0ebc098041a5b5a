#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scdram {

/// Non-negative rational MOC count such as 3/16.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  /// Accepts "n", "n/d", or a decimal with at most 6 fractional digits.
  static Rational parse(std::string_view text);

  double to_double() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;

  friend Rational operator+(Rational a, Rational b);
  friend bool operator==(const Rational&, const Rational&) = default;
};

struct ComponentOverhead {
  double area_mm2 = 0.0;
  double latency_ns = 0.0;
  double energy_pj = 0.0;
};

/// Per-accelerator timing, energy and area parameters.
struct AcceleratorConfig {
  std::string name;
  Rational mul_mocs;
  Rational acc_mocs;
  double moc_ns = 0.0;
  double b2s_ns = 0.0;
  double pc_ns = 0.0;
  std::int64_t num_pes = 1;
  double area_mm2 = 0.0;
  /// 0 means "derive from modeled energy".
  double avg_power_w = 0.0;
  std::map<std::string, ComponentOverhead> component_overheads;
  std::int64_t bitline_cells = 0;
  double transfer_ns_per_hop = 0.0;
  bool pc_offloaded = false;
  double moc_energy_pj = 0.0;
  std::int64_t row_bits = 8192;
  std::int64_t reserved_rows = 0;
  /// Storage footprint of one weight operand.
  std::int64_t weight_bits_per_mac = 8;

  // Published reference values, carried for regression reports only.
  std::optional<double> published_mac_ns;
  std::optional<std::int64_t> published_num_pes;
  /// Alternative ACC MOC count under which the published MAC ns might have
  /// been computed.
  std::optional<Rational> alt_acc_mocs;

  /// Default per-MOC energy: 4 nJ at 512 cells per bitline, scaled linearly
  /// with bitline length.
  static double default_moc_energy_pj(std::int64_t bitline_cells) noexcept {
    return 4000.0 * static_cast<double>(bitline_cells) / 512.0;
  }

  /// MACs that one pass of the compute primitive covers: the least common
  /// denominator of the MUL and ACC MOC counts (16 for 3/16 + 2/16).
  std::int64_t macs_per_fmac() const;
  /// Whole MOCs per pass of the compute primitive.
  std::int64_t mocs_per_fmac() const;
  double fmac_ns() const { return static_cast<double>(mocs_per_fmac()) * moc_ns; }

  /// Throws ValidationError naming the first violated field.
  void validate() const;
};

/// Parses one config from JSON text. Missing or mistyped fields raise a
/// ValidationError naming the field.
AcceleratorConfig parse_config(std::string_view json_text, std::string_view origin = "<string>");
AcceleratorConfig load_config(const std::filesystem::path& path);
/// Loads every *.json file in `dir`, sorted by file name.
std::vector<AcceleratorConfig> load_config_dir(const std::filesystem::path& dir);

}  // namespace scdram
