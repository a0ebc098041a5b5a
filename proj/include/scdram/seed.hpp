#pragma once

#include <cstdint>

namespace scdram {

// SplitMix64 finalizer. Used as a counter-based generator: output i of a
// stream is mix64(seed + (i + 1) * kGolden), so any element is addressable
// without stepping through its predecessors.
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t counter_draw(std::uint64_t seed, std::uint64_t index) noexcept {
  return mix64(seed + (index + 1) * kGolden);
}

/// Seed-splitting rule shared by every randomized component:
///   child = mix64(mix64(master ^ (stream * kGolden)) + index * kGolden)
/// `stream` names the consumer (see SeedStream), `index` the trial or item.
/// Children of distinct (stream, index) pairs are independent of worker
/// count because they never depend on execution order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) noexcept {
  return mix64(mix64(master ^ (stream * kGolden)) + index * kGolden);
}

enum SeedStream : std::uint64_t {
  kStreamRnd = 1,
  kStreamOperands = 2,
  kStreamEncoding = 3,
  kStreamWeights = 4,
  kStreamInputs = 5,
  kStreamRelatch = 6,
};

/// Sequential generator over the same counter-based stream.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) noexcept : seed_(seed) {}

  std::uint64_t next() noexcept { return counter_draw(seed_, counter_++); }

  // Uniform in [0, bound) via the high half of a 128-bit product.
  std::uint64_t below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * bound) >> 64);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

}  // namespace scdram
