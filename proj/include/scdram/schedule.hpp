#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "scdram/accelerator_config.hpp"
#include "scdram/mapper.hpp"

namespace scdram {

enum class EventKind { ComputeMoc, B2S, PopCount, TransferHop, Stall };

std::string_view to_string(EventKind kind) noexcept;

/// One run of identical operations on one PE. `count` is the number of
/// primitive operations folded into the run (MOCs, conversions or hops).
struct ScheduleEvent {
  std::uint64_t pe = 0;
  EventKind kind = EventKind::ComputeMoc;
  double start_ns = 0.0;
  double duration_ns = 0.0;
  std::size_t layer = 0;
  std::uint64_t image = 0;
  std::uint64_t count = 0;

  double end_ns() const noexcept { return start_ns + duration_ns; }
};

struct LayerMetrics {
  std::size_t layer_index = 0;
  std::string name;
  LayerKind kind = LayerKind::Conv;
  std::uint64_t macs = 0;
  std::uint64_t units = 0;
  double start_ns = 0.0;
  double latency_ns = 0.0;
  double compute_ns = 0.0;  // critical PE
  double stall_ns = 0.0;    // critical PE
  std::uint64_t critical_pe = 0;
};

struct Metrics {
  std::string network;
  std::string accelerator;
  std::uint64_t batch = 1;
  double latency_ns = 0.0;   // makespan for the whole batch
  double compute_ns = 0.0;   // compute time along the critical PEs
  double stall_ns = 0.0;     // operand-wait time along the critical PEs
  double fps = 0.0;          // batch / makespan
  double mbr = 0.0;          // stall_ns / latency_ns
  double energy_pj = 0.0;
  double modeled_power_w = 0.0;
  double power_w = 0.0;      // avg_power_w when configured, else modeled
  double efficiency = 0.0;   // fps / power_w / area
  /// Compute-busy time summed over all PEs, per MAC.
  double compute_ns_per_mac = 0.0;
  std::uint64_t macs = 0;
  std::uint64_t b2s_events = 0;
  std::uint64_t pc_events = 0;
  std::uint64_t hop_events = 0;
  std::vector<LayerMetrics> layers;
  std::vector<std::string> notices;
};

struct ScheduleOptions {
  bool record_events = false;
};

struct ScheduleResult {
  Metrics metrics;
  std::vector<ScheduleEvent> events;  // empty unless record_events
};

/// Event-driven simulation of a mapped network.
///
/// Per layer and per PE load class, each image goes through
///   B2S (FPU LUT) -> activation TransferHop (link) -> ComputeMoc (array)
///   -> PopCount (serial counter, or the array when not offloaded)
///   -> partial-sum TransferHop (link),
/// and spilled weight rows are moved in once per layer ahead of the first
/// compute run. Resources serve jobs in (ready time, PE id, sequence) order.
/// Array idle time while compute waits for operands is recorded as Stall.
/// Layers are separated by a barrier; the PE finishing last defines the
/// layer's critical compute and stall times. Throws InvalidArgument when
/// batch == 0.
ScheduleResult simulate_schedule(const Mapping& mapping, const AcceleratorConfig& cfg, std::uint64_t batch,
                                 ScheduleOptions options = {});

/// Header comment plus one row per Metrics:
///   format_version,network,accelerator,batch,latency_ns,fps,power_w,efficiency,
///   mbr,compute_ns,stall_ns,compute_ns_per_mac,energy_pj,macs
void write_metrics_csv(std::ostream& os, std::span<const Metrics> rows);
/// One row per (Metrics, layer):
///   format_version,network,accelerator,batch,layer_index,layer,kind,macs,units,
///   start_ns,latency_ns,compute_ns,stall_ns,critical_pe
void write_layer_csv(std::ostream& os, std::span<const Metrics> rows);

}  // namespace scdram
