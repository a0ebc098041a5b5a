#include "scdram/perf_model.hpp"

#include <cmath>

#include "scdram/csv.hpp"
#include "scdram/error.hpp"

namespace scdram {

namespace {

double component_energy(const AcceleratorConfig& cfg, const std::string& key) {
  auto it = cfg.component_overheads.find(key);
  return it == cfg.component_overheads.end() ? 0.0 : it->second.energy_pj;
}

}  // namespace

bool TimingReport::discrepancy() const noexcept {
  return published_mac_ns && std::abs(*published_mac_ns - per_mac_ns) > 1e-9 * std::max(1.0, per_mac_ns);
}

TimingReport per_mac_latency(const AcceleratorConfig& cfg) {
  TimingReport t;
  t.per_mac_ns = (cfg.mul_mocs + cfg.acc_mocs).to_double() * cfg.moc_ns;
  t.macs_per_fmac = cfg.macs_per_fmac();
  const double macs = static_cast<double>(t.macs_per_fmac);
  t.breakdown["mul"] = cfg.mul_mocs.to_double() * macs * cfg.moc_ns;
  t.breakdown["acc"] = cfg.acc_mocs.to_double() * macs * cfg.moc_ns;
  t.fmac_ns = cfg.fmac_ns();
  t.published_mac_ns = cfg.published_mac_ns;
  if (cfg.alt_acc_mocs) t.alt_mac_ns = (cfg.mul_mocs + *cfg.alt_acc_mocs).to_double() * cfg.moc_ns;
  return t;
}

double fmac_energy(const AcceleratorConfig& cfg, double moc_energy_pj) {
  if (moc_energy_pj < 0) throw InvalidArgument("per-MOC energy must be non-negative");
  return static_cast<double>(cfg.mocs_per_fmac()) * moc_energy_pj + component_energy(cfg, "mux_acc") +
         component_energy(cfg, "rnd_registers");
}

double conversion_energy(const AcceleratorConfig& cfg, std::uint64_t b2s_events, std::uint64_t pc_events) {
  return static_cast<double>(b2s_events) * component_energy(cfg, "b2s_lut") +
         static_cast<double>(pc_events) * component_energy(cfg, "pop_counter");
}

double efficiency(double fps, double power_w, double area_mm2) {
  if (!(power_w > 0.0)) throw InvalidArgument("efficiency needs positive power");
  if (!(area_mm2 > 0.0)) throw InvalidArgument("efficiency needs positive area");
  return fps / power_w / area_mm2;
}

double bottleneck_ratio(double stall_ns, double total_ns) {
  if (!(total_ns > 0.0)) throw InvalidArgument("bottleneck ratio needs positive total time");
  if (stall_ns < 0.0) throw InvalidArgument("negative stall time");
  if (stall_ns > total_ns) throw InvalidArgument("stall time exceeds total time (accounting error)");
  return stall_ns / total_ns;
}

void write_regression_csv(std::ostream& os, std::span<const AcceleratorConfig> configs) {
  os << "format_version,accelerator,mul_mocs,acc_mocs,moc_ns,macs_per_fmac,fmac_ns,computed_mac_ns,"
        "published_mac_ns,alt_mac_ns,status,num_pes,published_num_pes,area_mm2\n";
  for (const auto& cfg : configs) {
    const TimingReport t = per_mac_latency(cfg);
    const char* status = !t.published_mac_ns ? "unpublished" : t.discrepancy() ? "mismatch" : "match";
    os << kFormatVersion << ',' << csv_field(cfg.name) << ',' << cfg.mul_mocs.to_string() << ','
       << cfg.acc_mocs.to_string() << ',' << fmt_double(cfg.moc_ns) << ',' << t.macs_per_fmac << ','
       << fmt_double(t.fmac_ns) << ',' << fmt_double(t.per_mac_ns) << ',' << fmt_optional(t.published_mac_ns)
       << ',' << fmt_optional(t.alt_mac_ns) << ',' << status << ',' << cfg.num_pes << ','
       << (cfg.published_num_pes ? std::to_string(*cfg.published_num_pes) : std::string()) << ','
       << fmt_double(cfg.area_mm2) << '\n';
  }
}

}  // namespace scdram
