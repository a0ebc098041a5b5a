// scdram: command-line driver for the stochastic DRAM accelerator model.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "scdram/accelerator_config.hpp"
#include "scdram/csv.hpp"
#include "scdram/encoding.hpp"
#include "scdram/error.hpp"
#include "scdram/error_lab.hpp"
#include "scdram/mapper.hpp"
#include "scdram/network.hpp"
#include "scdram/perf_model.hpp"
#include "scdram/processing_element.hpp"
#include "scdram/schedule.hpp"

namespace fs = std::filesystem;
using namespace scdram;

namespace {

using G = SubarrayGeometry;

struct Common {
  std::uint64_t seed = 1;
  std::string out;
  unsigned parallel = 1;
};

void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& configs,
                    const std::vector<std::string>& networks, const Common& common, nlohmann::json extra) {
  nlohmann::json m;
  m["format_version"] = kFormatVersion;
  m["command"] = command;
  m["config_paths"] = configs;
  m["network_paths"] = networks;
  m["seed"] = common.seed;
  m["output_directory"] = common.out;
  m["rnd_algorithm"] = std::string(RndSelects::kAlgorithm);
  m["parameters"] = std::move(extra);
  std::ofstream os(dir / "manifest.json");
  os << m.dump(2) << '\n';
}

fs::path prepare_out(const Common& common) {
  fs::path dir(common.out);
  fs::create_directories(dir);
  return dir;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot write " + path.string());
  os << text;
}

template <typename T>
T parse_uint(std::string_view s, const std::string& what, int line = 0) {
  T v{};
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw ParseError("invalid " + what + " '" + std::string(s) + "'", line);
  }
  return v;
}

// ---------------------------------------------------------------------------
// fmac-demo

struct OperandPairs {
  std::array<std::uint32_t, G::kOperandsPerRow> a{};
  std::array<std::uint32_t, G::kOperandsPerRow> b{};
};

// Sixteen lines of "a b" (or "a,b"), 8-bit codes; blank lines and '#'
// comments are ignored.
OperandPairs read_operands(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open operands file " + path);
  OperandPairs ops;
  std::string line;
  int lineno = 0;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::vector<std::string> tok;
    for (std::string t; fields >> t;) tok.push_back(t);
    if (tok.empty()) continue;
    if (tok.size() != 2) throw ParseError("expected two operand values, got " + std::to_string(tok.size()), lineno);
    if (n == G::kOperandsPerRow) throw ParseError("more than 16 operand pairs", lineno);
    const auto a = parse_uint<std::uint32_t>(tok[0], "operand", lineno);
    const auto b = parse_uint<std::uint32_t>(tok[1], "operand", lineno);
    if (a > 255 || b > 255) throw ParseError("operand values must lie in [0, 255]", lineno);
    ops.a[n] = a;
    ops.b[n] = b;
    ++n;
  }
  if (n != G::kOperandsPerRow) {
    throw ParseError("expected 16 operand pairs, found " + std::to_string(n), lineno);
  }
  return ops;
}

std::string abridged(const BitVector& operand) { return operand.slice(0, 64).to_string() + "..."; }

int cmd_fmac_demo(const Common& common, const std::string& operands_path, const std::string& layout_name,
                  bool relatch) {
  const OperandPairs ops = operands_path.empty() ? OperandPairs{} : read_operands(operands_path);
  PeOptions opt;
  opt.layout = layout_name == "strided" ? RowLayout::Strided : RowLayout::Contiguous;
  opt.relatch = relatch;
  ProcessingElement pe(common.seed, opt);

  std::array<BitVector, G::kOperandsPerRow> n_ops;
  std::array<BitVector, G::kOperandsPerRow> m_ops;
  double reference = 0.0;
  for (std::size_t i = 0; i < G::kOperandsPerRow; ++i) {
    n_ops[i] = encode_b2s(ops.a[i], G::kOperandBits, EncodingScheme::thermometer());
    m_ops[i] = encode_b2s(ops.b[i], G::kOperandBits, EncodingScheme::clock_division());
    reference += (ops.a[i] / 256.0) * (ops.b[i] / 256.0);
  }
  constexpr RowId kN = 0, kM = 1, kOut = 2;
  pe.load_operands(kN, n_ops);
  pe.load_operands(kM, m_ops);
  const std::size_t writes = pe.trace().size();
  const FmacResult r = pe.exec_fmac(kN, kM, kOut, 0);
  const std::uint64_t count = pe.pop_count(kOut, 0).count;

  std::ostringstream os;
  os << "# scdram fmac-demo format_version=" << kFormatVersion << " seed=" << common.seed
     << " layout=" << layout_name << " relatch=" << (relatch ? "true" : "false") << '\n';
  os << "rnd " << RndSelects::kAlgorithm << " lanes[0..31]:";
  for (std::size_t i = 0; i < 32; ++i) os << ' ' << int(pe.rnd()[i]);
  os << '\n';
  os << "moc trace (" << r.events.size() << " compute MOCs, " << writes << " operand writes before):\n";
  for (const auto& e : r.events) {
    os << "  " << e.seq << ' ' << to_string(e.kind) << " src=" << (e.src ? std::to_string(*e.src) : "-")
       << " dst=" << (e.dst ? std::to_string(*e.dst) : "-") << " t_ns=" << fmt_double(e.start_ns) << '\n';
  }
  os << "compute_ns " << fmt_double(static_cast<double>(r.events.size()) * opt.timing.moc_ns) << '\n';
  os << "rows (operands 0 and 1, first 64 bits):\n";
  const auto show = [&](const char* label, RowId row) {
    for (std::size_t i = 0; i < 2; ++i) {
      const BitVector v = pe.operand(row, i);
      os << "  " << label << '[' << i << "] " << abridged(v) << " ones=" << v.popcount() << '\n';
    }
  };
  show("N      ", kN);
  show("M      ", kM);
  show("N AND M", G::kRow1);
  show("Row3   ", G::kRow3);
  os << "  out     " << abridged(r.output) << " ones=" << count << '\n';
  os << "result mantissa=" << r.value.mantissa << " scale_log2=" << r.value.scale_log2
     << " reference_length=" << r.value.reference_length << " scaled=" << fmt_double(r.value.scaled())
     << " value=" << fmt_double(r.value.value()) << '\n';
  os << "float reference sum=" << fmt_double(reference) << " scaled=" << fmt_double(reference / 16.0)
     << " abs_error=" << fmt_double(std::abs(r.value.value() - reference)) << '\n';

  std::cout << os.str();
  if (!common.out.empty()) {
    const fs::path dir = prepare_out(common);
    write_file(dir / "fmac_demo.txt", os.str());
    std::ostringstream trace;
    write_trace_jsonl(trace, pe.trace());
    write_file(dir / "trace.jsonl", trace.str());
    write_manifest(dir, "fmac-demo", {}, {}, common,
                   {{"operands", operands_path}, {"layout", layout_name}, {"relatch", relatch}});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// perf-compare

std::vector<std::uint64_t> parse_batches(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    item.erase(std::remove_if(item.begin(), item.end(), ::isspace), item.end());
    if (item.empty()) continue;
    const auto b = parse_uint<std::uint64_t>(item, "batch size");
    if (b == 0) throw InvalidArgument("batch sizes must be positive");
    out.push_back(b);
  }
  if (out.empty()) throw InvalidArgument("batch list is empty");
  return out;
}

std::vector<AcceleratorConfig> load_configs(const std::vector<std::string>& paths) {
  std::vector<AcceleratorConfig> out;
  for (const auto& p : paths) {
    if (fs::is_directory(p)) {
      auto dir = load_config_dir(p);
      out.insert(out.end(), dir.begin(), dir.end());
    } else {
      out.push_back(load_config(p));
    }
  }
  if (out.empty()) throw InvalidArgument("no accelerator configs given");
  return out;
}

template <typename Fn>
void run_indexed(std::size_t n, unsigned parallel, Fn&& fn) {
  const unsigned workers = std::max(1U, std::min<unsigned>(parallel, static_cast<unsigned>(n)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next++) < n;) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

int cmd_perf_compare(const Common& common, const std::vector<std::string>& config_paths,
                     const std::vector<std::string>& network_paths, const std::string& batch_text, bool trace) {
  const auto configs = load_configs(config_paths);
  const auto batches = parse_batches(batch_text);
  std::vector<NetworkSpec> networks;
  for (const auto& p : network_paths) networks.push_back(load_network(p));

  std::ostringstream regression;
  write_regression_csv(regression, configs);

  struct Job {
    std::size_t net, cfg, batch;
  };
  std::vector<Job> jobs;
  for (std::size_t n = 0; n < networks.size(); ++n)
    for (std::size_t c = 0; c < configs.size(); ++c)
      for (std::size_t b = 0; b < batches.size(); ++b) jobs.push_back({n, c, b});
  std::vector<ScheduleResult> results(jobs.size());
  run_indexed(jobs.size(), common.parallel, [&](std::size_t i) {
    const Job& j = jobs[i];
    const Mapping m = map_network(networks[j.net], configs[j.cfg]);
    results[i] = simulate_schedule(m, configs[j.cfg], batches[j.batch], ScheduleOptions{trace});
  });
  std::vector<Metrics> metrics;
  for (auto& r : results) metrics.push_back(r.metrics);

  if (common.out.empty()) {
    std::cout << regression.str();
    if (!metrics.empty()) {
      std::cout << '\n';
      write_metrics_csv(std::cout, metrics);
    }
    return 0;
  }
  const fs::path dir = prepare_out(common);
  write_file(dir / "regression.csv", regression.str());
  if (!metrics.empty()) {
    std::ostringstream mcsv, lcsv;
    write_metrics_csv(mcsv, metrics);
    write_layer_csv(lcsv, metrics);
    write_file(dir / "metrics.csv", mcsv.str());
    write_file(dir / "layers.csv", lcsv.str());
  }
  if (trace) {
    std::ostringstream ev;
    ev << "format_version,network,accelerator,batch,pe,kind,start_ns,duration_ns,layer,image,count\n";
    for (std::size_t i = 0; i < results.size(); ++i) {
      for (const auto& e : results[i].events) {
        ev << kFormatVersion << ',' << csv_field(metrics[i].network) << ',' << csv_field(metrics[i].accelerator)
           << ',' << metrics[i].batch << ',' << e.pe << ',' << to_string(e.kind) << ',' << fmt_double(e.start_ns)
           << ',' << fmt_double(e.duration_ns) << ',' << e.layer << ',' << e.image << ',' << e.count << '\n';
      }
    }
    write_file(dir / "schedule_events.csv", ev.str());
  }
  for (const auto& m : metrics) {
    for (const auto& note : m.notices) std::cerr << m.network << '/' << m.accelerator << ": " << note << '\n';
  }
  write_manifest(dir, "perf-compare", config_paths, network_paths, common,
                 {{"batches", batches}, {"trace", trace}});
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// ape-sweep

int cmd_ape_sweep(const Common& common, const std::vector<std::size_t>& lengths, std::uint64_t trials,
                  unsigned fanin, const std::string& convention) {
  SweepOptions opt;
  opt.lengths = lengths;
  opt.trials = trials;
  opt.fanin = fanin;
  opt.seed = common.seed;
  opt.parallel = common.parallel;
  const bool both = convention == "both";
  opt.convention = both ? ApeConvention::UnscaledSum : parse_convention(convention);
  std::vector<ApeStats> rows = ape_sweep(opt);
  if (both) {
    // The conventions differ by the constant fan-in factor.
    const std::size_t n = rows.size();
    for (std::size_t i = 0; i < n; ++i) {
      ApeStats s = rows[i];
      const double f = convention_factor(ApeConvention::UnscaledSum, fanin);
      s.mean /= f;
      s.stddev /= f;
      s.stderr_mean /= f;
      s.p99 /= f;
      s.convention = ApeConvention::ScaledOutput;
      rows.push_back(s);
    }
  }
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  if (common.out.empty()) {
    std::cout << csv.str();
    return 0;
  }
  const fs::path dir = prepare_out(common);
  write_file(dir / "ape_sweep.csv", csv.str());
  write_manifest(dir, "ape-sweep", {}, {}, common,
                 {{"lengths", lengths}, {"trials", trials}, {"fanin", fanin}, {"convention", convention}});
  std::cout << "wrote " << dir.string() << '\n';
  return 0;
}

void add_common(CLI::App* cmd, Common& c, bool with_parallel) {
  cmd->add_option("--seed", c.seed, "Master seed (u64)");
  cmd->add_option("--out", c.out, "Output directory (stdout when omitted)");
  if (with_parallel) {
    cmd->add_option("--parallel", c.parallel, "Worker threads; outputs do not depend on it")
        ->check(CLI::PositiveNumber);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic-computing DRAM accelerator model"};
  app.require_subcommand(1);
  Common common;

  auto* demo = app.add_subcommand("fmac-demo", "Run one 16-operand F_MAC and print the MOC trace");
  add_common(demo, common, true);
  std::string operands;
  std::string layout = "contiguous";
  bool relatch = false;
  demo->add_option("--operands", operands, "File with 16 lines of 'a b' 8-bit codes")->check(CLI::ExistingFile);
  demo->add_option("--layout", layout, "Row layout")->check(CLI::IsMember({"contiguous", "strided"}));
  demo->add_option("--relatch", relatch, "Regenerate RND selects after each F_MAC (true|false)");

  auto* perf = app.add_subcommand("perf-compare", "Per-MAC regression and schedule metrics");
  add_common(perf, common, true);
  std::vector<std::string> config_paths;
  std::vector<std::string> network_paths;
  std::string batches = "1,64";
  bool trace = false;
  perf->add_option("--config", config_paths, "Config file or directory of *.json configs")->required();
  perf->add_option("--network", network_paths, "Network layer table (JSON); repeatable");
  perf->add_option("--batch", batches, "Comma-separated batch sizes");
  perf->add_flag("--trace", trace, "Also write schedule_events.csv");

  auto* sweep = app.add_subcommand("ape-sweep", "Monte Carlo APE statistics per bit-stream length");
  add_common(sweep, common, true);
  std::vector<std::size_t> lengths = {64, 128, 256, 512, 1024};
  std::uint64_t trials = 100000;
  unsigned fanin = 16;
  std::string convention = "unscaled";
  sweep->add_option("--lengths", lengths, "Bit-stream lengths (multiples of 64)")->delimiter(',');
  sweep->add_option("--trials", trials, "Trials per length");
  sweep->add_option("--fanin", fanin, "1 or 16")->check(CLI::IsMember({1U, 16U}));
  sweep->add_option("--convention", convention, "scaled|unscaled|both")
      ->check(CLI::IsMember({"scaled", "unscaled", "both"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*demo) return cmd_fmac_demo(common, operands, layout, relatch);
    if (*perf) return cmd_perf_compare(common, config_paths, network_paths, batches, trace);
    if (*sweep) return cmd_ape_sweep(common, lengths, trials, fanin, convention);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
