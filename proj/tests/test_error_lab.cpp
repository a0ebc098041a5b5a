#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "scdram/error.hpp"
#include "scdram/error_lab.hpp"
#include "scdram/seed.hpp"
#include "support.hpp"

using namespace scdram;

namespace {

// Straight-line copy of one trial: round to counts, build the patterns bit by
// bit, AND, multiplex lane by lane, count.
double reference_trial(const std::vector<OperandPair>& pairs, std::size_t length, std::uint64_t rnd_seed) {
  const RndSelects rnd = gen_rnd_selects(rnd_seed, length);
  std::vector<BitVector> products;
  double expected = 0.0;
  for (const auto& p : pairs) {
    const auto na = static_cast<std::size_t>(std::llround(p.a * static_cast<double>(length)));
    const auto nb = static_cast<std::size_t>(std::llround(p.b * static_cast<double>(length)));
    products.push_back(support::naive_and(support::naive_thermometer(na, length),
                                          support::naive_clock_division(nb, length)));
    expected += p.a * p.b;
  }
  const BitVector out = support::naive_mux(products, rnd);
  const double observed = 16.0 * static_cast<double>(support::naive_popcount(out)) / static_cast<double>(length);
  return std::abs(observed - expected);
}

}  // namespace

TEST_CASE("APE trial examples") {
  std::vector<OperandPair> zeros(16, {0.0, 0.0});
  CHECK(ape_trial(zeros, 512, 1, ApeConvention::UnscaledSum) == 0.0);
  std::vector<OperandPair> ones(16, {1.0, 1.0});
  CHECK(ape_trial(ones, 512, 1, ApeConvention::UnscaledSum) == 0.0);
  CHECK(ape_trial(ones, 512, 1, ApeConvention::ScaledOutput) == 0.0);

  std::vector<OperandPair> bad(16, {0.5, 1.5});
  CHECK_THROWS_AS(ape_trial(bad, 512, 1, ApeConvention::UnscaledSum), InvalidArgument);
  CHECK_THROWS_AS(ape_trial(zeros, 500, 1, ApeConvention::UnscaledSum), InvalidArgument);
  std::vector<OperandPair> three(3, {0.5, 0.5});
  CHECK_THROWS_AS(ape_trial(three, 512, 1, ApeConvention::UnscaledSum), InvalidArgument);
}

TEST_CASE("APE trial agrees with a duplicate implementation") {
  SplitMix64 rng(17);
  for (int t = 0; t < 200; ++t) {
    std::vector<OperandPair> pairs(16);
    for (auto& p : pairs) p = {rng.uniform(), rng.uniform()};
    const std::uint64_t seed = rng.next();
    for (std::size_t length : {64, 512, 1024}) {
      const double unscaled = ape_trial(pairs, length, seed, ApeConvention::UnscaledSum);
      REQUIRE(unscaled == doctest::Approx(reference_trial(pairs, length, seed)).epsilon(1e-12));
      REQUIRE(ape_trial(pairs, length, seed, ApeConvention::ScaledOutput) * 16.0 == doctest::Approx(unscaled));
    }
  }
}

TEST_CASE("conventions") {
  CHECK(parse_convention("scaled") == ApeConvention::ScaledOutput);
  CHECK(parse_convention("unscaled") == ApeConvention::UnscaledSum);
  CHECK_THROWS_AS(parse_convention("raw"), InvalidArgument);
  CHECK(convention_factor(ApeConvention::UnscaledSum, 16) == 16.0 * convention_factor(ApeConvention::ScaledOutput, 16));
}

TEST_CASE("APE sweep shape, band and determinism") {
  SweepOptions opt;
  opt.trials = 20000;
  const auto rows = ape_sweep(opt);
  REQUIRE(rows.size() == 5);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].length == opt.lengths[i]);
    CHECK(rows[i].mean >= 0.0);
    CHECK(rows[i].stddev >= 0.0);
    CHECK(rows[i].p99 >= rows[i].mean);
    if (i > 0) CHECK(rows[i].mean < rows[i - 1].mean);
  }
  CHECK(rows[3].length == 512);
  CHECK(rows[3].mean >= 0.2);
  CHECK(rows[3].mean <= 0.54);

  SweepOptions one;
  one.trials = 1;
  one.lengths = {512};
  const auto a = ape_sweep(one);
  const auto b = ape_sweep(one);
  CHECK(a.front().mean == b.front().mean);

  SweepOptions none;
  none.trials = 0;
  CHECK_THROWS_AS(ape_sweep(none), InvalidArgument);
}

TEST_CASE("APE sweep does not depend on the worker count") {
  SweepOptions opt;
  opt.trials = 5000;
  opt.lengths = {128, 512};
  opt.parallel = 1;
  std::ostringstream a, b;
  write_sweep_csv(a, ape_sweep(opt));
  opt.parallel = 7;
  write_sweep_csv(b, ape_sweep(opt));
  CHECK(a.str() == b.str());
}

TEST_CASE("APE estimates converge with more trials") {
  SweepOptions opt;
  opt.lengths = {512};
  opt.trials = 10000;
  const ApeStats small = ape_sweep(opt).front();
  opt.trials = 20000;
  const ApeStats large = ape_sweep(opt).front();
  CHECK(std::abs(large.mean - small.mean) < 3.0 * small.stderr_mean);
}

TEST_CASE("deterministic multiply contributes no APE beyond rounding") {
  SweepOptions opt;
  opt.lengths = {512};
  opt.trials = 5000;
  opt.fanin = 1;
  const ApeStats single = ape_sweep(opt).front();
  opt.fanin = 16;
  const ApeStats mux = ape_sweep(opt).front();
  // with one input the only error is operand rounding and the one-bit floor of the AND
  CHECK(single.p99 <= 3.0 / 512.0);
  CHECK(mux.mean > 50.0 * single.mean);
}

TEST_CASE("sweep CSV") {
  SweepOptions opt;
  opt.trials = 10;
  opt.lengths = {64};
  std::ostringstream os;
  write_sweep_csv(os, ape_sweep(opt));
  CHECK(os.str().rfind("format_version,length,fanin,convention,trials,mean,stddev,stderr,p99\n1,64,16,unscaled,10,",
                       0) == 0);
}

TEST_CASE("small network fidelity") {
  SUBCASE("all-zero weights give exact zeros") {
    SmallCnn net = make_random_small_cnn(1);
    for (auto& w : net.weights) std::fill(w.begin(), w.end(), 0);
    ProcessingElement pe(1);
    const auto rep = small_cnn_fidelity(net, make_random_input(net.spec.layers[0].input, 2), pe, 0.0);
    for (double v : rep.stochastic_outputs) CHECK(v == 0.0);
    CHECK(rep.max_output_error == 0.0);
    CHECK(rep.violations() == 0);
  }

  SUBCASE("a single full-scale weight passes its input through") {
    SmallCnn net;
    net.spec.name = "identity";
    LayerSpec fc;
    fc.name = "fc";
    fc.kind = LayerKind::FullyConnected;
    fc.input = {16, 1, 1};
    fc.out_features = 1;
    net.spec.layers = {fc};
    net.weights = {std::vector<std::int32_t>(16, 0)};
    net.weights[0][5] = 255;
    net.output_shift = {0};
    // Zero pairs are dropped, so the group carries one product next to 15
    // zero slots. With every input owning every 16th lane the MUX samples the
    // product on a regular grid. Full-scale ClockDivision leaves lanes 0 and
    // 256 clear, so a grid through them loses up to two output units
    // (16 / 512 each); any other phase is exact to one unit.
    constexpr double kUnit = 16.0 / 512.0;
    for (std::size_t phase = 0; phase < 16; ++phase) {
      std::vector<std::uint8_t> balanced(512);
      for (std::size_t j = 0; j < balanced.size(); ++j) balanced[j] = static_cast<std::uint8_t>((j + phase) % 16);
      const bool hits_gap = phase == 0;
      for (std::int32_t x = 0; x < 256; ++x) {
        std::vector<std::int32_t> in(16, 0);
        in[5] = x;
        ProcessingElement pe{RndSelects(balanced)};
        const auto rep = small_cnn_fidelity(net, in, pe, 16.0);
        CAPTURE(phase);
        CAPTURE(x);
        REQUIRE(rep.float_outputs[0] == doctest::Approx(x * 255.0 / 65536.0));
        const double err = std::abs(rep.stochastic_outputs[0] - x * 255.0 / 65536.0);
        REQUIRE(err <= (hits_gap ? 2.0 : 1.0) * kUnit);
      }
    }
  }

  SUBCASE("random two-layer network stays within the composition bound") {
    SweepOptions opt;
    opt.lengths = {512};
    opt.trials = 20000;
    const double p99 = ape_sweep(opt).front().p99;
    const SmallCnn net = make_random_small_cnn(7);
    CHECK(net.spec.total_macs() == 5888);
    for (std::uint64_t s = 0; s < 3; ++s) {
      ProcessingElement pe(derive_seed(7, kStreamRnd, s));
      const auto rep = small_cnn_fidelity(net, make_random_input(net.spec.layers[0].input, s), pe, p99);
      CHECK(rep.output_violations == 0);
      CHECK(rep.stochastic_outputs.size() == 10);
      for (std::size_t i = 0; i < rep.stochastic_outputs.size(); ++i) {
        CHECK(std::abs(rep.stochastic_outputs[i] - rep.float_outputs[i]) <= rep.output_bounds[i]);
      }
    }
  }
}
