#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"
#include "scdram/error.hpp"
#include "scdram/mapper.hpp"
#include "scdram/network.hpp"
#include "scdram/schedule.hpp"
#include "support.hpp"

using namespace scdram;

namespace {

NetworkSpec fc_network(std::int64_t in, std::int64_t out) {
  std::ostringstream os;
  os << R"({"name": "fc", "input": [)" << in << R"(, 1, 1], "layers": [{"name": "fc1", "kind": "fc", "out": )" << out
     << "}]}";
  return parse_network(os.str());
}

NetworkSpec shipped(const std::string& file) { return load_network(support::data_dir() / "networks" / file); }

}  // namespace

TEST_CASE("MAC counts") {
  LayerSpec fc;
  fc.kind = LayerKind::FullyConnected;
  fc.input = {4096, 1, 1};
  fc.out_features = 4096;
  CHECK(count_macs(fc) == 16777216ULL);

  LayerSpec tiny;
  tiny.kind = LayerKind::Conv;
  tiny.input = {1, 1, 1};
  tiny.out_channels = 1;
  CHECK(count_macs(tiny) == 1);

  LayerSpec conv1;
  conv1.kind = LayerKind::Conv;
  conv1.input = {3, 224, 224};
  conv1.out_channels = 96;
  conv1.kernel_h = conv1.kernel_w = 11;
  conv1.stride = 4;
  conv1.padding = 2;
  CHECK(conv1.output() == Shape{96, 55, 55});
  CHECK(count_macs(conv1) == 105415200ULL);

  const NetworkSpec alexnet = shipped("alexnet.json");
  CHECK(count_macs(alexnet.layers.front()) == 105415200ULL);
}

TEST_CASE("network parsing errors carry line numbers") {
  try {
    parse_network("{\n  \"name\": \"x\",\n  \"input\": [1, 2, 2],\n  \"layers\": [ {\"kind\": \"conv\" ,, } ]\n}");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS(parse_network(R"({"name": "x", "input": [1, 2, 2], "layers": [{"kind": "softmax"}]})"));
  // kernel larger than the padded input
  CHECK_THROWS_AS(
      parse_network(R"({"name": "x", "input": [1, 2, 2], "layers": [{"kind": "conv", "out_channels": 1, "kernel": 5}]})"),
      ValidationError);
}

TEST_CASE("shipped networks validate") {
  const std::map<std::string, std::size_t> layers = {
      {"vgg16.json", 36}, {"alexnet.json", 18}, {"resnet50.json", 105}, {"googlenet.json", 129}};
  for (const auto& [file, n] : layers) {
    const NetworkSpec net = shipped(file);
    CAPTURE(file);
    CHECK(net.layers.size() == n);
    CHECK_NOTHROW(net.validate());
    CHECK(net.total_macs() > 0);
  }
  // conventional reference totals
  CHECK(shipped("vgg16.json").total_macs() == 15470264320ULL);
}

TEST_CASE("mapping groups") {
  const AcceleratorConfig atria = support::shipped_config("ATRIA");
  SUBCASE("FC 16 -> 1 is one group on one PE") {
    const Mapping m = map_network(fc_network(16, 1), atria);
    REQUIRE(m.layers.size() == 1);
    CHECK(m.total_units() == 1);
    CHECK(m.layers[0].active_pes == 1);
    CHECK(m.units_on_pe(0) == 1);
    CHECK(m.units_on_pe(1) == 0);
    CHECK(m.layers[0].merges == 0);
  }
  SUBCASE("FC 32 -> 1 is two groups and one merge") {
    const Mapping m = map_network(fc_network(32, 1), atria);
    CHECK(m.total_units() == 2);
    CHECK(m.layers[0].merges == 1);
  }
  SUBCASE("VGG16 groups follow the per-layer formula") {
    const NetworkSpec vgg = shipped("vgg16.json");
    std::uint64_t expected = 0;
    for (const auto& l : vgg.layers) {
      if (l.dot_products() == 0) continue;
      expected += static_cast<std::uint64_t>((l.dot_length() + 15) / 16 * l.dot_products());
    }
    const Mapping m = map_network(vgg, atria);
    CHECK(m.total_units() == expected);
    CHECK(m.total_macs() == vgg.total_macs());
    std::uint64_t dealt = 0;
    for (std::uint64_t pe = 0; pe < m.num_pes; ++pe) dealt += m.units_on_pe(pe);
    CHECK(dealt == expected);
  }
  SUBCASE("one MAC per unit on non-stochastic designs") {
    const Mapping m = map_network(shipped("alexnet.json"), support::shipped_config("LACC"));
    CHECK(m.macs_per_unit == 1);
    CHECK(m.total_units() == m.total_macs());
  }
}

TEST_CASE("round-robin dealing balances within one unit") {
  const AcceleratorConfig atria = support::shipped_config("ATRIA");
  const Mapping m = map_network(shipped("alexnet.json"), atria);
  for (const auto& l : m.layers) {
    if (!l.has_compute()) continue;
    CHECK(l.units_high * l.pes_high + l.units_low * (l.active_pes - l.pes_high) == l.total_units);
    CHECK(l.units_high - l.units_low <= 1);
    CHECK(l.units_on_pe(0) == l.units_high);
  }
}

TEST_CASE("schedule of a single F_MAC on ATRIA") {
  const AcceleratorConfig atria = support::shipped_config("ATRIA");
  const auto r = simulate_schedule(map_network(fc_network(16, 1), atria), atria, 1, {true});
  CHECK(r.metrics.compute_ns == 85.0);
  CHECK(r.metrics.layers.at(0).compute_ns == 85.0);
  CHECK(r.metrics.latency_ns >= 85.0);
  std::size_t computes = 0;
  for (const auto& e : r.events) {
    if (e.kind == EventKind::ComputeMoc) {
      ++computes;
      CHECK(e.duration_ns == 85.0);
      CHECK(e.count == 5);
    }
  }
  CHECK(computes == 1);
}

TEST_CASE("schedule of an empty network") {
  NetworkSpec empty;
  empty.name = "empty";
  const AcceleratorConfig atria = support::shipped_config("ATRIA");
  const auto r = simulate_schedule(map_network(empty, atria), atria, 1);
  CHECK(r.metrics.latency_ns == 0.0);
  CHECK(r.metrics.mbr == 0.0);
  CHECK_THROWS_AS(simulate_schedule(map_network(empty, atria), atria, 0), InvalidArgument);
}

TEST_CASE("compute time is conserved per PE") {
  const AcceleratorConfig atria = support::shipped_config("ATRIA");
  const Mapping m = map_network(shipped("alexnet.json"), atria);
  const std::uint64_t batch = 3;
  const auto r = simulate_schedule(m, atria, batch, {true});
  std::map<std::pair<std::size_t, std::uint64_t>, double> busy;
  for (const auto& e : r.events) {
    if (e.kind == EventKind::ComputeMoc) busy[{e.layer, e.pe}] += e.duration_ns;
  }
  REQUIRE_FALSE(busy.empty());
  for (const auto& [key, ns] : busy) {
    const auto& layer = *std::find_if(m.layers.begin(), m.layers.end(),
                                      [&](const LayerMapping& l) { return l.layer_index == key.first; });
    CHECK(ns == doctest::Approx(5.0 * 17.0 * static_cast<double>(layer.units_on_pe(key.second) * batch)));
  }
}

TEST_CASE("schedule properties on shipped workloads") {
  const auto configs = support::shipped_configs();
  for (const char* file : {"alexnet.json", "vgg16.json"}) {
    const NetworkSpec net = shipped(file);
    double atria_per_mac = 0.0;
    double best_other = 1e300;
    for (const auto& cfg : configs) {
      CAPTURE(cfg.name);
      const Mapping m = map_network(net, cfg);
      const auto b1 = simulate_schedule(m, cfg, 1).metrics;
      const auto b64 = simulate_schedule(m, cfg, 64).metrics;
      CHECK(b64.mbr <= b1.mbr);
      CHECK(b1.mbr >= 0.0);
      CHECK(b1.mbr <= 1.0);
      CHECK(b1.fps == doctest::Approx(1.0 / (b1.latency_ns * 1e-9)));

      AcceleratorConfig no_offload = cfg;
      no_offload.pc_offloaded = false;
      CHECK(b1.latency_ns <= simulate_schedule(m, no_offload, 1).metrics.latency_ns);

      if (cfg.name == "ATRIA") {
        atria_per_mac = b1.compute_ns_per_mac;
      } else {
        best_other = std::min(best_other, b1.compute_ns_per_mac);
      }
    }
    CHECK(atria_per_mac < best_other);
  }
}

TEST_CASE("throughput does not drop when the PE count doubles") {
  const NetworkSpec net = shipped("alexnet.json");
  for (const char* name : {"ATRIA", "LACC"}) {
    AcceleratorConfig cfg = support::shipped_config(name);
    double previous = 0.0;
    for (std::int64_t pes = 256; pes <= 16384; pes *= 2) {
      cfg.num_pes = pes;
      const double fps = simulate_schedule(map_network(net, cfg), cfg, 1).metrics.fps;
      CAPTURE(pes);
      CHECK(fps >= previous);
      previous = fps;
    }
  }
}

TEST_CASE("schedules are deterministic") {
  const AcceleratorConfig cfg = support::shipped_config("SCOPE-H2D");
  const Mapping m = map_network(shipped("googlenet.json"), cfg);
  std::ostringstream a, b;
  const std::vector<Metrics> ra{simulate_schedule(m, cfg, 4).metrics};
  const std::vector<Metrics> rb{simulate_schedule(m, cfg, 4).metrics};
  write_metrics_csv(a, ra);
  write_layer_csv(a, ra);
  write_metrics_csv(b, rb);
  write_layer_csv(b, rb);
  CHECK(a.str() == b.str());
}
