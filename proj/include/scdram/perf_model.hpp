#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>

#include "scdram/accelerator_config.hpp"

namespace scdram {

struct TimingReport {
  double per_mac_ns = 0.0;
  double fmac_ns = 0.0;
  std::int64_t macs_per_fmac = 1;
  std::map<std::string, double> breakdown;  // "mul", "acc"; sums to fmac_ns

  std::optional<double> published_mac_ns;
  /// Per-MAC latency with alt_acc_mocs substituted, when the config has one.
  std::optional<double> alt_mac_ns;

  /// True when a published value exists and differs from the computed one.
  bool discrepancy() const noexcept;
};

/// per_mac_ns = (mul_mocs + acc_mocs) * moc_ns.
TimingReport per_mac_latency(const AcceleratorConfig& cfg);

/// Energy of one compute pass: mocs_per_fmac * moc_energy_pj plus the
/// per-pass FPU components ("mux_acc" and "rnd_registers" when present).
double fmac_energy(const AcceleratorConfig& cfg, double moc_energy_pj);

/// Energy of conversion events, charged per event from the "b2s_lut" and
/// "pop_counter" component entries.
double conversion_energy(const AcceleratorConfig& cfg, std::uint64_t b2s_events,
                         std::uint64_t pc_events);

/// FPS / W / mm^2. Throws InvalidArgument for non-positive denominators.
double efficiency(double fps, double power_w, double area_mm2);

/// stall / total. Throws InvalidArgument unless 0 <= stall <= total and total > 0.
double bottleneck_ratio(double stall_ns, double total_ns);

/// CSV with header
///   format_version,accelerator,mul_mocs,acc_mocs,moc_ns,macs_per_fmac,fmac_ns,
///   computed_mac_ns,published_mac_ns,alt_mac_ns,status,num_pes,published_num_pes,area_mm2
/// status is "match", "mismatch" or "unpublished".
void write_regression_csv(std::ostream& os, std::span<const AcceleratorConfig> configs);

}  // namespace scdram
