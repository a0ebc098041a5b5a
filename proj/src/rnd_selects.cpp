#include "scdram/rnd_selects.hpp"

#include "scdram/error.hpp"
#include "scdram/seed.hpp"

namespace scdram {

RndSelects::RndSelects(std::vector<std::uint8_t> selects) : selects_(std::move(selects)) {
  if (selects_.empty()) throw InvalidArgument("RND select sequence is empty");
  masks_.assign(kFanIn, BitVector(selects_.size()));
  for (std::size_t lane = 0; lane < selects_.size(); ++lane) {
    if (selects_[lane] >= kFanIn) throw InvalidArgument("RND select value exceeds 4 bits");
    masks_[selects_[lane]].set(lane);
  }
}

RndSelects RndSelects::generate(std::uint64_t seed, std::size_t lanes) {
  std::vector<std::uint8_t> sel(lanes);
  std::uint64_t word = 0;
  for (std::size_t lane = 0; lane < lanes; ++lane) {
    if (lane % 16 == 0) word = counter_draw(seed, lane / 16);
    sel[lane] = static_cast<std::uint8_t>((word >> (4 * (lane % 16))) & 0xF);
  }
  return RndSelects(std::move(sel));
}

}  // namespace scdram
