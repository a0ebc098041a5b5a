#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scdram/accelerator_config.hpp"
#include "scdram/network.hpp"

namespace scdram {

/// How one layer's work lands on the PEs.
///
/// Every dot product of length D is split into ceil(D / macs_per_unit)
/// compute units (16-operand F_MAC groups on a 16-MAC primitive). Units are
/// dealt round-robin starting at PE 0, so PEs [0, pes_high) hold
/// units_high units and the rest hold units_low = units_high - 1 (or all hold
/// the same count when the division is exact).
struct LayerMapping {
  std::size_t layer_index = 0;
  std::string name;
  LayerKind kind = LayerKind::Conv;
  std::uint64_t macs = 0;
  std::uint64_t outputs = 0;
  std::uint64_t dot_length = 0;
  std::uint64_t units_per_output = 0;
  std::uint64_t total_units = 0;
  /// Binary partial-sum merges: outputs * (units_per_output - 1).
  std::uint64_t merges = 0;
  /// Activation values converted B-to-S once per consuming layer.
  std::uint64_t input_activations = 0;

  std::uint64_t active_pes = 0;
  std::uint64_t pes_high = 0;
  std::uint64_t units_high = 0;
  std::uint64_t units_low = 0;

  /// Weight rows a PE holding `units` needs, and the part that does not fit
  /// in the subarray and has to be moved in.
  std::uint64_t weight_rows(std::uint64_t units) const noexcept { return ceil_div(units * weight_bits_per_unit, row_bits); }
  std::uint64_t spilled_rows(std::uint64_t units) const noexcept {
    const std::uint64_t rows = weight_rows(units);
    return rows > resident_rows ? rows - resident_rows : 0;
  }

  std::uint64_t units_on_pe(std::uint64_t pe) const noexcept;
  bool has_compute() const noexcept { return total_units > 0; }

  std::uint64_t weight_bits_per_unit = 0;
  std::uint64_t row_bits = 8192;
  std::uint64_t resident_rows = 0;

  static constexpr std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) noexcept {
    return b == 0 ? 0 : (a + b - 1) / b;
  }
};

struct Mapping {
  std::string network;
  std::string accelerator;
  std::uint64_t num_pes = 1;
  std::uint64_t macs_per_unit = 1;
  std::vector<LayerMapping> layers;

  std::uint64_t total_units() const;
  std::uint64_t total_macs() const;
  std::uint64_t units_on_pe(std::uint64_t pe) const;
};

/// Rows per subarray kept free for operands and results while computing.
inline constexpr std::int64_t kWorkingRows = 2;

/// Decomposes every Conv/FC layer into compute units and deals them over
/// cfg.num_pes PEs. Weights are pre-placed in stochastic (or native) format,
/// so only activations produce B-to-S work; rows beyond subarray capacity
/// become spilled rows that the scheduler moves in as transfer hops.
Mapping map_network(const NetworkSpec& net, const AcceleratorConfig& cfg);

}  // namespace scdram
