#pragma once

#include <cstddef>
#include <cstdint>

#include "scdram/bit_vector.hpp"

namespace scdram {

enum class EncodingKind { Thermometer, ClockDivision, PseudoRandom };

/// How set bits are placed when a binary value is converted to a bit-vector.
/// Thermometer and ClockDivision are deterministic; pairing them for the two
/// multiplicands makes the AND product exact to one bit.
struct EncodingScheme {
  EncodingKind kind = EncodingKind::Thermometer;
  std::uint64_t seed = 0;  // PseudoRandom only

  static constexpr EncodingScheme thermometer() { return {EncodingKind::Thermometer, 0}; }
  static constexpr EncodingScheme clock_division() { return {EncodingKind::ClockDivision, 0}; }
  static constexpr EncodingScheme pseudo_random(std::uint64_t seed) {
    return {EncodingKind::PseudoRandom, seed};
  }
};

constexpr unsigned kDefaultWidth = 8;

/// Places exactly `ones` set bits in a `length`-bit vector per `scheme`:
///  - Thermometer: positions [0, ones).
///  - ClockDivision: position j is set iff floor((j+1)*ones/length) >
///    floor(j*ones/length), so any prefix of n bits holds floor(n*ones/length).
///  - PseudoRandom: a seeded Fisher-Yates shuffle of the Thermometer pattern.
BitVector encode_count(std::size_t ones, std::size_t length, EncodingScheme scheme);

/// Binary-to-stochastic conversion of a `width`-bit unsigned value. The
/// result holds k * length / 2^width set bits. Throws LengthMismatch when
/// `length` is not a multiple of 2^width, InvalidArgument when k >= 2^width.
BitVector encode_b2s(std::uint32_t k, std::size_t length, EncodingScheme scheme,
                     unsigned width = kDefaultWidth);

/// Stochastic-to-binary conversion (pop count).
inline std::uint64_t decode_s2b(const BitVector& v) noexcept { return v.popcount(); }

}  // namespace scdram
