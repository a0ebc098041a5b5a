#include "scdram/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "scdram/csv.hpp"
#include "scdram/error.hpp"
#include "scdram/perf_model.hpp"

namespace scdram {

std::string_view to_string(EventKind kind) noexcept {
  switch (kind) {
    case EventKind::ComputeMoc: return "ComputeMoc";
    case EventKind::B2S: return "B2S";
    case EventKind::PopCount: return "PopCount";
    case EventKind::TransferHop: return "TransferHop";
    case EventKind::Stall: return "Stall";
  }
  return "?";
}

namespace {

constexpr std::uint64_t kActivationBits = 8;
constexpr std::uint64_t kPartialSumBits = 32;

enum Resource : int { kLut = 0, kLink = 1, kArray = 2, kCounter = 3, kResourcesPerPe = 4 };

struct Edge {
  int to;
  bool from_start;  // successor may start `offset` after this job starts
  double offset;
};

struct Job {
  int resource = 0;  // class * kResourcesPerPe + Resource
  EventKind kind = EventKind::ComputeMoc;
  double duration = 0.0;
  std::uint64_t count = 0;
  std::uint64_t pe = 0;
  std::uint64_t image = 0;
  std::vector<Edge> out;
  int pending = 0;
  double ready = 0.0;
  double start = 0.0;
  double end = 0.0;
  // Offloaded pop-count runs: they cannot finish before the paired compute
  // run ends plus one pop count.
  int paired_compute = -1;
  double tail_ns = 0.0;
};

struct PeClass {
  std::uint64_t pe = 0;
  std::uint64_t units = 0;
  std::uint64_t multiplicity = 0;
};

struct ClassOutcome {
  double end = 0.0;
  double compute_ns = 0.0;
  double stall_ns = 0.0;
};

class LayerSimulator {
 public:
  LayerSimulator(const LayerMapping& layer, const AcceleratorConfig& cfg, const Mapping& mapping, std::uint64_t batch,
                 double t0, std::vector<ScheduleEvent>* events)
      : layer_(layer), cfg_(cfg), mapping_(mapping), batch_(batch), t0_(t0), events_(events) {}

  std::vector<ClassOutcome> run(const std::vector<PeClass>& classes, Metrics& m) {
    for (std::size_t c = 0; c < classes.size(); ++c) build_class(static_cast<int>(c), classes[c], m);
    res_free_.assign(classes.size() * kResourcesPerPe, t0_);
    outcomes_.assign(classes.size(), ClassOutcome{t0_, 0.0, 0.0});

    using Key = std::tuple<double, std::uint64_t, int>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;
    for (int j = 0; j < static_cast<int>(jobs_.size()); ++j) {
      if (jobs_[j].pending == 0) queue.emplace(jobs_[j].ready, jobs_[j].pe, j);
    }
    while (!queue.empty()) {
      const int j = std::get<2>(queue.top());
      queue.pop();
      Job& job = jobs_[j];
      double& free_at = res_free_[job.resource];
      const int cls = job.resource / kResourcesPerPe;
      job.start = std::max(job.ready, free_at);
      if (job.paired_compute >= 0) {
        job.duration = std::max(job.duration, jobs_[job.paired_compute].end + job.tail_ns - job.start);
      }
      job.end = job.start + job.duration;
      if (job.kind == EventKind::ComputeMoc) {
        const double gap = job.start - free_at;
        if (gap > 0.0) {
          outcomes_[cls].stall_ns += gap;
          emit(job.pe, EventKind::Stall, free_at, gap, job.image, 0);
        }
        outcomes_[cls].compute_ns += job.duration;
      }
      free_at = job.end;
      outcomes_[cls].end = std::max(outcomes_[cls].end, job.end);
      emit(job.pe, job.kind, job.start, job.duration, job.image, job.count);
      for (const Edge& e : job.out) {
        Job& next = jobs_[e.to];
        next.ready = std::max(next.ready, e.from_start ? job.start + e.offset : job.end);
        if (--next.pending == 0) queue.emplace(next.ready, next.pe, e.to);
      }
    }
    return outcomes_;
  }

 private:
  int add(int cls, Resource r, EventKind kind, double duration, std::uint64_t count, std::uint64_t pe,
          std::uint64_t image, std::initializer_list<int> deps) {
    Job job;
    job.resource = cls * kResourcesPerPe + r;
    job.kind = kind;
    job.duration = duration;
    job.count = count;
    job.pe = pe;
    job.image = image;
    job.ready = t0_;
    const int id = static_cast<int>(jobs_.size());
    jobs_.push_back(std::move(job));
    for (int d : deps) link(d, id, false, 0.0);
    return id;
  }

  void link(int from, int to, bool from_start, double offset) {
    if (from < 0) return;
    jobs_[from].out.push_back({to, from_start, offset});
    ++jobs_[to].pending;
  }

  void build_class(int cls, const PeClass& pc, Metrics& m) {
    const double hop = cfg_.transfer_ns_per_hop;
    const std::uint64_t u = pc.units;
    const double unit_ns = cfg_.fmac_ns();
    const bool has_pc = cfg_.pc_ns > 0.0;

    const std::uint64_t b2s_share =
        cfg_.b2s_ns > 0.0 ? LayerMapping::ceil_div(layer_.input_activations, layer_.active_pes) : 0;
    const std::uint64_t need = std::min(layer_.input_activations, u * mapping_.macs_per_unit);
    const std::uint64_t act_rows = LayerMapping::ceil_div(need * kActivationBits, layer_.row_bits);
    const std::uint64_t spill = layer_.spilled_rows(u);

    std::uint64_t reduce_hops = 0;
    const std::uint64_t span = std::min(layer_.units_per_output, mapping_.num_pes);
    if (span > 1) {
      const auto depth = static_cast<std::uint64_t>(std::ceil(std::log2(static_cast<double>(span))));
      const std::uint64_t partial_rows =
          LayerMapping::ceil_div(std::min(layer_.outputs, u) * kPartialSumBits, layer_.row_bits);
      reduce_hops = depth + partial_rows - 1;
    }

    int weights = -1;
    if (spill > 0 && hop > 0.0) {
      weights = add(cls, kLink, EventKind::TransferHop, static_cast<double>(spill) * hop, spill, pc.pe, 0, {});
    }
    m.hop_events += spill * pc.multiplicity;

    for (std::uint64_t img = 0; img < batch_; ++img) {
      int b2s = -1;
      if (b2s_share > 0) {
        b2s = add(cls, kLut, EventKind::B2S, static_cast<double>(b2s_share) * cfg_.b2s_ns, b2s_share, pc.pe, img, {});
      }
      int delivery = b2s;
      if (act_rows > 0 && hop > 0.0) {
        delivery = add(cls, kLink, EventKind::TransferHop, static_cast<double>(act_rows) * hop, act_rows, pc.pe, img,
                       {b2s});
      }
      const int compute = add(cls, kArray, EventKind::ComputeMoc, static_cast<double>(u) * unit_ns,
                              u * static_cast<std::uint64_t>(cfg_.mocs_per_fmac()), pc.pe, img, {delivery, weights});
      int last = compute;
      if (has_pc) {
        const double pcs = static_cast<double>(u) * cfg_.pc_ns;
        if (cfg_.pc_offloaded) {
          last = add(cls, kCounter, EventKind::PopCount, pcs, u, pc.pe, img, {});
          link(compute, last, true, unit_ns);
          jobs_[last].paired_compute = compute;
          jobs_[last].tail_ns = cfg_.pc_ns;
        } else {
          last = add(cls, kArray, EventKind::PopCount, pcs, u, pc.pe, img, {compute});
        }
      }
      if (reduce_hops > 0 && hop > 0.0) {
        add(cls, kLink, EventKind::TransferHop, static_cast<double>(reduce_hops) * hop, reduce_hops, pc.pe, img,
            {last});
      }
      m.hop_events += (act_rows + reduce_hops) * pc.multiplicity;
    }
    const double units_total = static_cast<double>(u * batch_ * pc.multiplicity);
    m.energy_pj += units_total * fmac_energy(cfg_, cfg_.moc_energy_pj);
    if (has_pc) m.pc_events += u * batch_ * pc.multiplicity;
    m.compute_ns_per_mac += units_total * unit_ns;  // normalized by the caller
  }

  void emit(std::uint64_t pe, EventKind kind, double start, double duration, std::uint64_t image,
            std::uint64_t count) {
    if (events_ == nullptr || duration <= 0.0) return;
    events_->push_back(ScheduleEvent{pe, kind, start, duration, layer_.layer_index, image, count});
  }

  const LayerMapping& layer_;
  const AcceleratorConfig& cfg_;
  const Mapping& mapping_;
  std::uint64_t batch_;
  double t0_;
  std::vector<ScheduleEvent>* events_;
  std::vector<Job> jobs_;
  std::vector<double> res_free_;
  std::vector<ClassOutcome> outcomes_;
};

std::vector<PeClass> classes_of(const LayerMapping& l, std::uint64_t num_pes) {
  std::vector<PeClass> out;
  if (l.total_units == 0) return out;
  out.push_back({0, l.units_high, l.pes_high});
  if (l.pes_high < num_pes && l.units_low > 0) out.push_back({l.pes_high, l.units_low, num_pes - l.pes_high});
  return out;
}

}  // namespace

ScheduleResult simulate_schedule(const Mapping& mapping, const AcceleratorConfig& cfg, std::uint64_t batch,
                                 ScheduleOptions options) {
  if (batch == 0) throw InvalidArgument("batch size must be at least 1");
  ScheduleResult result;
  Metrics& m = result.metrics;
  m.network = mapping.network;
  m.accelerator = mapping.accelerator;
  m.batch = batch;
  m.macs = mapping.total_macs() * batch;

  double t = 0.0;
  for (const LayerMapping& l : mapping.layers) {
    LayerMetrics lm;
    lm.layer_index = l.layer_index;
    lm.name = l.name;
    lm.kind = l.kind;
    lm.macs = l.macs;
    lm.units = l.total_units;
    lm.start_ns = t;
    const auto classes = classes_of(l, mapping.num_pes);
    if (!classes.empty()) {
      m.b2s_events += cfg.b2s_ns > 0.0 ? l.input_activations * batch : 0;
      LayerSimulator sim(l, cfg, mapping, batch, t, options.record_events ? &result.events : nullptr);
      const auto outcomes = sim.run(classes, m);
      std::size_t critical = 0;
      for (std::size_t c = 1; c < outcomes.size(); ++c) {
        if (outcomes[c].end > outcomes[critical].end) critical = c;
      }
      lm.latency_ns = outcomes[critical].end - t;
      lm.compute_ns = outcomes[critical].compute_ns;
      lm.stall_ns = outcomes[critical].stall_ns;
      lm.critical_pe = classes[critical].pe;
    }
    t += lm.latency_ns;
    m.latency_ns += lm.latency_ns;
    m.compute_ns += lm.compute_ns;
    m.stall_ns += lm.stall_ns;
    m.layers.push_back(std::move(lm));
  }
  m.energy_pj += conversion_energy(cfg, m.b2s_events, m.pc_events);
  m.compute_ns_per_mac = m.macs > 0 ? m.compute_ns_per_mac / static_cast<double>(m.macs) : 0.0;

  if (m.latency_ns > 0.0) {
    m.mbr = bottleneck_ratio(std::min(m.stall_ns, m.latency_ns), m.latency_ns);
    m.fps = static_cast<double>(batch) / (m.latency_ns * 1e-9);
    m.modeled_power_w = m.energy_pj * 1e-12 / (m.latency_ns * 1e-9);
    m.power_w = cfg.avg_power_w > 0.0 ? cfg.avg_power_w : m.modeled_power_w;
    m.efficiency = m.power_w > 0.0 ? efficiency(m.fps, m.power_w, cfg.area_mm2) : 0.0;
  } else {
    m.notices.push_back("network '" + mapping.network + "' has no compute layers; metrics are zero");
  }
  return result;
}

void write_metrics_csv(std::ostream& os, std::span<const Metrics> rows) {
  os << "# fps = batch / makespan of the whole batch (steady-state, pipeline fill included once); "
        "mbr = operand-wait stall on the critical PEs / makespan\n";
  os << "format_version,network,accelerator,batch,latency_ns,fps,power_w,efficiency,mbr,compute_ns,stall_ns,"
        "compute_ns_per_mac,energy_pj,macs\n";
  for (const auto& m : rows) {
    os << kFormatVersion << ',' << csv_field(m.network) << ',' << csv_field(m.accelerator) << ',' << m.batch << ','
       << fmt_double(m.latency_ns) << ',' << fmt_double(m.fps) << ',' << fmt_double(m.power_w) << ','
       << fmt_double(m.efficiency) << ',' << fmt_double(m.mbr) << ',' << fmt_double(m.compute_ns) << ','
       << fmt_double(m.stall_ns) << ',' << fmt_double(m.compute_ns_per_mac) << ',' << fmt_double(m.energy_pj)
       << ',' << m.macs << '\n';
  }
}

void write_layer_csv(std::ostream& os, std::span<const Metrics> rows) {
  os << "format_version,network,accelerator,batch,layer_index,layer,kind,macs,units,start_ns,latency_ns,"
        "compute_ns,stall_ns,critical_pe\n";
  for (const auto& m : rows) {
    for (const auto& l : m.layers) {
      os << kFormatVersion << ',' << csv_field(m.network) << ',' << csv_field(m.accelerator) << ',' << m.batch << ','
         << l.layer_index << ',' << csv_field(l.name) << ',' << to_string(l.kind) << ',' << l.macs << ','
         << l.units << ',' << fmt_double(l.start_ns) << ',' << fmt_double(l.latency_ns) << ','
         << fmt_double(l.compute_ns) << ',' << fmt_double(l.stall_ns) << ',' << l.critical_pe << '\n';
    }
  }
}

}  // namespace scdram
