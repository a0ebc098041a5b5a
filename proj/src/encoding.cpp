#include "scdram/encoding.hpp"

#include <utility>
#include <vector>

#include "scdram/error.hpp"
#include "scdram/seed.hpp"

namespace scdram {

BitVector encode_count(std::size_t ones, std::size_t length, EncodingScheme scheme) {
  if (ones > length) throw InvalidArgument("more set bits requested than the vector holds");
  BitVector v(length);
  switch (scheme.kind) {
    case EncodingKind::Thermometer: {
      auto words = v.mutable_words();
      for (std::size_t w = 0; w < ones / 64; ++w) words[w] = ~std::uint64_t{0};
      if (ones % 64 != 0) words[ones / 64] = (std::uint64_t{1} << (ones % 64)) - 1;
      break;
    }
    case EncodingKind::ClockDivision: {
      // Bit j is set when (j+1)*ones crosses a multiple of length, tracked
      // incrementally through the remainder of j*ones modulo length.
      auto words = v.mutable_words();
      std::size_t rem = 0;
      for (std::size_t j = 0; j < length; ++j) {
        rem += ones;
        if (rem >= length) {
          rem -= length;
          words[j / 64] |= std::uint64_t{1} << (j % 64);
        }
      }
      break;
    }
    case EncodingKind::PseudoRandom: {
      std::vector<std::size_t> order(length);
      for (std::size_t j = 0; j < length; ++j) order[j] = j;
      SplitMix64 rng(scheme.seed);
      for (std::size_t j = length - 1; j > 0; --j) std::swap(order[j], order[rng.below(j + 1)]);
      for (std::size_t j = 0; j < ones; ++j) v.set(order[j]);
      break;
    }
  }
  return v;
}

BitVector encode_b2s(std::uint32_t k, std::size_t length, EncodingScheme scheme, unsigned width) {
  if (width == 0 || width > 16) throw InvalidArgument("encoding width must be in [1, 16]");
  const std::size_t levels = std::size_t{1} << width;
  if (length == 0 || length % levels != 0) {
    throw LengthMismatch("bit-vector length " + std::to_string(length) +
                         " is not a multiple of 2^" + std::to_string(width));
  }
  if (k >= levels) throw InvalidArgument("binary value does not fit the encoding width");
  return encode_count(k * (length / levels), length, scheme);
}

}  // namespace scdram
