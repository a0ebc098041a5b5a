#include <sys/wait.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("scdram_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream os;
  os << is.rdbuf();
  return os.str();
}

Run run(const std::string& args) {
  static int counter = 0;
  const fs::path dir = scratch("run" + std::to_string(counter++));
  const std::string cmd = support::cli_path().string() + " " + args + " >" + (dir / "out").string() + " 2>" +
                          (dir / "err").string();
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(dir / "out");
  r.err = slurp(dir / "err");
  return r;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

std::string configs() { return (support::data_dir() / "configs").string(); }

}  // namespace

TEST_CASE("fmac-demo") {
  const Run zero = run("fmac-demo --seed 3");
  REQUIRE(zero.status == 0);
  CHECK(zero.out.find("result mantissa=0 ") != std::string::npos);
  CHECK(zero.out.find("5 compute MOCs") != std::string::npos);
  std::size_t mocs = 0;
  for (const char* kind : {"RowCloneCopy", "TripleRowActivateAnd", "ReadToSA", "MuxAccWriteBack"}) {
    for (std::size_t pos = zero.out.find(kind); pos != std::string::npos; pos = zero.out.find(kind, pos + 1)) ++mocs;
  }
  CHECK(mocs == 5);
  CHECK(run("fmac-demo --seed 3").out == zero.out);

  const fs::path dir = scratch("ops");
  {
    std::ofstream os(dir / "max.txt");
    os << "# sixteen full-scale pairs\n";
    for (int i = 0; i < 16; ++i) os << "255 255\n";
  }
  const Run full = run("fmac-demo --operands " + (dir / "max.txt").string());
  REQUIRE(full.status == 0);
  // (255/256)^2 per lane; the AND keeps floor(510 * 510 / 512) = 508 of 512 bits
  CHECK(full.out.find("result mantissa=508 scale_log2=-4") != std::string::npos);
  CHECK(full.out.find("float reference sum=15.875244140625") != std::string::npos);

  {
    std::ofstream os(dir / "bad.txt");
    os << "1 2\n3 x\n";
  }
  const Run bad = run("fmac-demo --operands " + (dir / "bad.txt").string());
  CHECK(bad.status != 0);
  CHECK(bad.err.find("line 2") != std::string::npos);

  const Run strided = run("fmac-demo --seed 3 --layout strided --relatch true --out " + (dir / "demo").string());
  CHECK(strided.status == 0);
  CHECK(count_lines(slurp(dir / "demo" / "trace.jsonl")) == 7);
  CHECK(fs::exists(dir / "demo" / "manifest.json"));
}

TEST_CASE("perf-compare") {
  const fs::path dir = scratch("perf");
  const Run only = run("perf-compare --config " + configs() + " --out " + (dir / "only").string());
  REQUIRE(only.status == 0);
  CHECK(count_lines(slurp(dir / "only" / "regression.csv")) == 7);
  CHECK_FALSE(fs::exists(dir / "only" / "metrics.csv"));

  {
    std::ofstream os(dir / "tiny.json");
    os << R"({"name": "tiny", "input": [3, 8, 8], "layers": [
      {"name": "c1", "kind": "conv", "out_channels": 4, "kernel": 3, "padding": 1},
      {"kind": "relu"},
      {"name": "f2", "kind": "fc", "out": 10}]})";
  }
  const Run tiny = run("perf-compare --config " + configs() + " --network " + (dir / "tiny.json").string() +
                       " --batch 1,64 --out " + (dir / "tiny").string());
  REQUIRE(tiny.status == 0);
  // comment line + header + 6 configs x 2 batches
  CHECK(count_lines(slurp(dir / "tiny" / "metrics.csv")) == 2 + 12);
  const std::string manifest = slurp(dir / "tiny" / "manifest.json");
  CHECK(manifest.find("\"format_version\": 1") != std::string::npos);
  CHECK(manifest.find("\"seed\"") != std::string::npos);

  CHECK(run("perf-compare --config " + configs() + " --batch \"\"").status != 0);
  CHECK(run("perf-compare --config " + configs() + " --batch 0").status != 0);

  {
    std::ofstream os(dir / "broken.json");
    os << R"({"name": "B", "mul_mocs": 1, "acc_mocs": 1, "b2s_ns": 0, "pc_ns": 0, "num_pes": 1,
      "area_mm2": 1, "bitline_cells": 64, "transfer_ns_per_hop": 1, "pc_offloaded": false,
      "weight_bits_per_mac": 8})";
  }
  const Run broken = run("perf-compare --config " + (dir / "broken.json").string());
  CHECK(broken.status != 0);
  CHECK(broken.err.find("moc_ns") != std::string::npos);
}

TEST_CASE("ape-sweep") {
  const Run defaults = run("ape-sweep --trials 2000");
  REQUIRE(defaults.status == 0);
  CHECK(count_lines(defaults.out) == 1 + 5);
  CHECK(run("ape-sweep --trials 2000").out == defaults.out);
  CHECK(run("ape-sweep --trials 0").status != 0);
  CHECK(run("ape-sweep --convention nonsense").status != 0);
  CHECK(count_lines(run("ape-sweep --trials 100 --convention both").out) == 1 + 10);
}

TEST_CASE("unknown subcommands fail") {
  CHECK(run("").status != 0);
  CHECK(run("no-such-command").status != 0);
}
