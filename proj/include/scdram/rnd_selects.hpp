#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "scdram/bit_vector.hpp"

namespace scdram {

/// Select lines for the 16:1 MUX array, one 4-bit value per lane.
///
/// Lane masks (the set of lanes routed to each MUX input) are built once at
/// construction so accumulation runs word-parallel.
class RndSelects {
 public:
  static constexpr std::size_t kDefaultLanes = 512;
  static constexpr unsigned kFanIn = 16;
  /// Identifier of the generation algorithm, recorded in run manifests.
  static constexpr std::string_view kAlgorithm = "splitmix64-nibble-v1";

  /// Throws InvalidArgument if any entry is >= 16 or the sequence is empty.
  explicit RndSelects(std::vector<std::uint8_t> selects);

  /// Lane i takes nibble (i mod 16) of counter_draw(seed, i / 16).
  static RndSelects generate(std::uint64_t seed, std::size_t lanes = kDefaultLanes);

  std::size_t lanes() const noexcept { return selects_.size(); }
  std::uint8_t operator[](std::size_t lane) const { return selects_.at(lane); }
  std::span<const std::uint8_t> values() const noexcept { return selects_; }

  /// Lanes whose MUX picks input `input`.
  const BitVector& lane_mask(unsigned input) const { return masks_.at(input); }

  friend bool operator==(const RndSelects& a, const RndSelects& b) {
    return a.selects_ == b.selects_;
  }

 private:
  std::vector<std::uint8_t> selects_;
  std::vector<BitVector> masks_;
};

inline RndSelects gen_rnd_selects(std::uint64_t seed,
                                  std::size_t lanes = RndSelects::kDefaultLanes) {
  return RndSelects::generate(seed, lanes);
}

}  // namespace scdram
