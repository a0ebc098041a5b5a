#include <cmath>
#include <sstream>
#include <string>

#include "doctest.h"
#include "scdram/error.hpp"
#include "scdram/perf_model.hpp"
#include "support.hpp"

using namespace scdram;

namespace {

const char* kMinimalConfig = R"({
  "name": "X", "mul_mocs": 1, "acc_mocs": 2, "moc_ns": 10, "b2s_ns": 0, "pc_ns": 0,
  "num_pes": 8, "area_mm2": 1, "bitline_cells": 256, "transfer_ns_per_hop": 4,
  "pc_offloaded": false, "weight_bits_per_mac": 8
})";

}  // namespace

TEST_CASE("rational parsing") {
  CHECK(Rational::parse("3/16") == Rational::make(3, 16));
  CHECK(Rational::parse("2/16") == Rational{1, 8});
  CHECK(Rational::parse("200") == Rational{200, 1});
  CHECK(Rational::parse("0.25") == Rational{1, 4});
  CHECK((Rational::parse("3/16") + Rational::parse("2/16")) == Rational{5, 16});
  CHECK_THROWS_AS(Rational::parse("3/0"), ValidationError);
  CHECK_THROWS_AS(Rational::parse("x"), ValidationError);
}

TEST_CASE("config parsing names the offending field") {
  const AcceleratorConfig c = parse_config(kMinimalConfig);
  CHECK(c.name == "X");
  CHECK(c.moc_energy_pj == AcceleratorConfig::default_moc_energy_pj(256));

  std::string missing = kMinimalConfig;
  missing.replace(missing.find(R"("moc_ns": 10, )"), 14, "");
  try {
    parse_config(missing);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("moc_ns") != std::string::npos);
  }

  std::string negative = kMinimalConfig;
  negative.replace(negative.find(R"("area_mm2": 1)"), 13, R"("area_mm2": -1)");
  CHECK_THROWS_AS(parse_config(negative), ValidationError);
  CHECK_THROWS(parse_config("{ not json"));
}

TEST_CASE("shipped configs carry the published PE counts and areas") {
  const auto cfgs = support::shipped_configs();
  REQUIRE(cfgs.size() == 6);
  const std::map<std::string, std::pair<std::int64_t, double>> expected = {
      {"ATRIA", {4096, 77.0}},         {"DRISA-1T1C-NOR", {16384, 55.0}}, {"DRISA-3T1C", {32768, 64.6}},
      {"SCOPE-Vanilla", {65536, 259.4}}, {"SCOPE-H2D", {65536, 273.4}},    {"LACC", {16384, 61.0}}};
  for (const auto& c : cfgs) {
    REQUIRE(expected.count(c.name) == 1);
    CHECK(c.num_pes == expected.at(c.name).first);
    CHECK(c.area_mm2 == expected.at(c.name).second);
  }
  CHECK(support::shipped_config("ATRIA").published_num_pes == 4098);
  CHECK(support::shipped_config("ATRIA").avg_power_w == 23.4);
}

TEST_CASE("per-MAC latency against the published table") {
  const std::map<std::string, std::pair<double, double>> table = {
      {"LACC", {231.0, 231.0}},          {"SCOPE-Vanilla", {56.0, 56.0}},   {"SCOPE-H2D", {200.0, 200.0}},
      {"DRISA-3T1C", {1688.0, 1768.0}}, {"DRISA-1T1C-NOR", {2220.0, 2110.0}}, {"ATRIA", {5.3125, 5.25}}};
  for (const auto& c : support::shipped_configs()) {
    const TimingReport r = per_mac_latency(c);
    const auto [computed, published] = table.at(c.name);
    CAPTURE(c.name);
    CHECK(r.per_mac_ns == computed);
    REQUIRE(r.published_mac_ns.has_value());
    CHECK(*r.published_mac_ns == published);
    CHECK(r.discrepancy() == (computed != published));
    CHECK(r.breakdown.at("mul") + r.breakdown.at("acc") == doctest::Approx(r.fmac_ns));
  }
  const TimingReport atria = per_mac_latency(support::shipped_config("ATRIA"));
  CHECK(atria.fmac_ns == 85.0);
  CHECK(atria.macs_per_fmac == 16);
  // the swapped-ACC reading reproduces only the 1T1C-NOR row
  CHECK(per_mac_latency(support::shipped_config("DRISA-1T1C-NOR")).alt_mac_ns == 2110.0);
  CHECK(per_mac_latency(support::shipped_config("DRISA-3T1C")).alt_mac_ns == 1776.0);
}

TEST_CASE("per-MAC latency grows with MOC time and MOC count") {
  AcceleratorConfig c = parse_config(kMinimalConfig);
  const double base = per_mac_latency(c).per_mac_ns;
  c.moc_ns += 1;
  CHECK(per_mac_latency(c).per_mac_ns > base);
  c = parse_config(kMinimalConfig);
  c.acc_mocs = Rational::make(3, 1);
  CHECK(per_mac_latency(c).per_mac_ns > base);
}

TEST_CASE("F_MAC and conversion energy from the component table") {
  const AcceleratorConfig atria = support::shipped_config("ATRIA");
  CHECK(fmac_energy(atria, 0.0) == doctest::Approx(25.6));
  CHECK(fmac_energy(atria, 1000.0) == doctest::Approx(5025.6));
  CHECK(conversion_energy(atria, 1, 1) == doctest::Approx(153.9));
  CHECK(conversion_energy(atria, 0, 0) == 0.0);
}

TEST_CASE("efficiency and bottleneck ratio") {
  CHECK(efficiency(100.0, 23.4, 77.0) == doctest::Approx(100.0 / 23.4 / 77.0));
  CHECK(efficiency(100.0, 23.4, 77.0) == doctest::Approx(0.0555).epsilon(0.001));
  CHECK(efficiency(0.0, 5.0, 3.0) == 0.0);
  CHECK(efficiency(10.0, 2.0, 6.0) == doctest::Approx(2.0 * efficiency(10.0, 2.0, 12.0)));
  CHECK_THROWS_AS(efficiency(1.0, 0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(efficiency(1.0, 1.0, -1.0), InvalidArgument);

  CHECK(bottleneck_ratio(0.0, 50.0) == 0.0);
  CHECK(bottleneck_ratio(50.0, 50.0) == 1.0);
  CHECK_THROWS_AS(bottleneck_ratio(60.0, 50.0), InvalidArgument);
  CHECK_THROWS_AS(bottleneck_ratio(0.0, 0.0), InvalidArgument);
}

TEST_CASE("regression CSV") {
  const auto cfgs = support::shipped_configs();
  std::ostringstream os;
  write_regression_csv(os, cfgs);
  const std::string csv = os.str();
  CHECK(csv.rfind("format_version,accelerator,mul_mocs,acc_mocs,moc_ns,macs_per_fmac,fmac_ns,computed_mac_ns,", 0) ==
        0);
  CHECK(csv.find("1,LACC,1,10,21,1,231,231,231,,match,") != std::string::npos);
  CHECK(csv.find(",5.3125,5.25,,mismatch,4096,4098,77") != std::string::npos);
}
