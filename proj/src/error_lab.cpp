#include "scdram/error_lab.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <thread>

#include "scdram/csv.hpp"
#include "scdram/encoding.hpp"
#include "scdram/error.hpp"
#include "scdram/seed.hpp"
#include "scdram/stochastic.hpp"

namespace scdram {

std::string_view to_string(ApeConvention c) noexcept {
  return c == ApeConvention::UnscaledSum ? "unscaled" : "scaled";
}

ApeConvention parse_convention(std::string_view text) {
  if (text == "unscaled") return ApeConvention::UnscaledSum;
  if (text == "scaled") return ApeConvention::ScaledOutput;
  throw InvalidArgument("unknown APE convention '" + std::string(text) + "' (expected scaled|unscaled)");
}

namespace {

std::size_t quantize(double x, std::size_t length) {
  return static_cast<std::size_t>(std::llround(x * static_cast<double>(length)));
}

// B-to-S lookup tables for one length: entry n holds the pattern with n set bits.
class EncoderTables {
 public:
  explicit EncoderTables(std::size_t length) : length_(length) {
    thermometer_.reserve(length + 1);
    clock_division_.reserve(length + 1);
    for (std::size_t n = 0; n <= length; ++n) {
      thermometer_.push_back(encode_count(n, length, EncodingScheme::thermometer()));
      clock_division_.push_back(encode_count(n, length, EncodingScheme::clock_division()));
    }
  }
  std::size_t length() const noexcept { return length_; }
  const BitVector& thermometer(double x) const { return thermometer_[quantize(x, length_)]; }
  const BitVector& clock_division(double x) const { return clock_division_[quantize(x, length_)]; }

 private:
  std::size_t length_;
  std::vector<BitVector> thermometer_;
  std::vector<BitVector> clock_division_;
};

void check_trial_args(std::span<const OperandPair> pairs, std::size_t length) {
  if (pairs.size() != 1 && pairs.size() != RndSelects::kFanIn) {
    throw InvalidArgument("APE trials take 1 or 16 operand pairs");
  }
  if (length == 0 || length % 64 != 0) throw InvalidArgument("APE trial length must be a positive multiple of 64");
  for (const auto& p : pairs) {
    if (!(p.a >= 0.0 && p.a <= 1.0 && p.b >= 0.0 && p.b <= 1.0)) {
      throw InvalidArgument("APE operands must lie in [0, 1]");
    }
  }
}

template <typename EncodeA, typename EncodeB>
double run_trial(std::span<const OperandPair> pairs, std::size_t length, std::uint64_t rnd_seed,
                 ApeConvention convention, EncodeA&& encode_a, EncodeB&& encode_b) {
  const unsigned fanin = static_cast<unsigned>(pairs.size());
  double expected_sum = 0.0;
  for (const auto& p : pairs) expected_sum += p.a * p.b;

  double observed_scaled = 0.0;
  if (fanin == 1) {
    observed_scaled = sc_mul(encode_a(pairs[0].a), encode_b(pairs[0].b)).value();
  } else {
    std::array<BitVector, RndSelects::kFanIn> products;
    for (unsigned i = 0; i < fanin; ++i) products[i] = sc_mul(encode_a(pairs[i].a), encode_b(pairs[i].b));
    observed_scaled = sc_acc16(products, gen_rnd_selects(rnd_seed, length)).value();
  }
  const double ape_scaled = std::abs(observed_scaled - expected_sum / fanin);
  return ape_scaled * convention_factor(convention, fanin);
}

std::uint64_t length_rnd_seed(std::uint64_t seed, std::uint64_t trial, std::size_t length) {
  return derive_seed(derive_seed(seed, kStreamRnd, trial), length, 0);
}

}  // namespace

double ape_trial(std::span<const OperandPair> pairs, std::size_t length, std::uint64_t rnd_seed,
                 ApeConvention convention) {
  check_trial_args(pairs, length);
  return run_trial(
      pairs, length, rnd_seed, convention,
      [length](double a) { return encode_count(quantize(a, length), length, EncodingScheme::thermometer()); },
      [length](double b) { return encode_count(quantize(b, length), length, EncodingScheme::clock_division()); });
}

std::vector<ApeStats> ape_sweep(const SweepOptions& options) {
  if (options.trials == 0) throw InvalidArgument("APE sweep needs at least one trial");
  if (options.fanin != 1 && options.fanin != RndSelects::kFanIn) throw InvalidArgument("fan-in must be 1 or 16");
  if (options.lengths.empty()) throw InvalidArgument("APE sweep needs at least one length");
  for (std::size_t l : options.lengths) {
    if (l == 0 || l % 64 != 0) throw InvalidArgument("APE sweep lengths must be positive multiples of 64");
  }
  const unsigned workers = std::max(1U, options.parallel);

  std::vector<ApeStats> out;
  for (std::size_t length : options.lengths) {
    const EncoderTables lut(length);
    std::vector<double> apes(options.trials);
    auto work = [&](std::uint64_t begin, std::uint64_t end) {
      std::vector<OperandPair> pairs(options.fanin);
      for (std::uint64_t t = begin; t < end; ++t) {
        SplitMix64 rng(derive_seed(options.seed, kStreamOperands, t));
        for (auto& p : pairs) {
          p.a = rng.uniform();
          p.b = rng.uniform();
        }
        apes[t] = run_trial(
            pairs, length, length_rnd_seed(options.seed, t, length), options.convention,
            [&lut](double a) -> const BitVector& { return lut.thermometer(a); },
            [&lut](double b) -> const BitVector& { return lut.clock_division(b); });
      }
    };
    if (workers == 1) {
      work(0, options.trials);
    } else {
      std::vector<std::thread> pool;
      const std::uint64_t chunk = (options.trials + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        const std::uint64_t begin = std::min<std::uint64_t>(options.trials, w * chunk);
        const std::uint64_t end = std::min<std::uint64_t>(options.trials, begin + chunk);
        if (begin < end) pool.emplace_back(work, begin, end);
      }
      for (auto& t : pool) t.join();
    }

    ApeStats s;
    s.trials = options.trials;
    s.length = length;
    s.fanin = options.fanin;
    s.convention = options.convention;
    double sum = 0.0;
    for (double x : apes) sum += x;
    s.mean = sum / static_cast<double>(apes.size());
    double ss = 0.0;
    for (double x : apes) ss += (x - s.mean) * (x - s.mean);
    s.stddev = apes.size() > 1 ? std::sqrt(ss / static_cast<double>(apes.size() - 1)) : 0.0;
    s.stderr_mean = s.stddev / std::sqrt(static_cast<double>(apes.size()));
    // nearest-rank 99th percentile
    const auto rank = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(apes.size())));
    std::nth_element(apes.begin(), apes.begin() + static_cast<std::ptrdiff_t>(rank - 1), apes.end());
    s.p99 = apes[rank - 1];
    out.push_back(s);
  }
  return out;
}

void write_sweep_csv(std::ostream& os, std::span<const ApeStats> rows) {
  os << "format_version,length,fanin,convention,trials,mean,stddev,stderr,p99\n";
  for (const auto& s : rows) {
    os << kFormatVersion << ',' << s.length << ',' << s.fanin << ',' << to_string(s.convention) << ',' << s.trials
       << ',' << fmt_double(s.mean) << ',' << fmt_double(s.stddev) << ',' << fmt_double(s.stderr_mean) << ','
       << fmt_double(s.p99) << '\n';
  }
}

}  // namespace scdram
