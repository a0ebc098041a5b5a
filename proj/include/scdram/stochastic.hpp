#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "scdram/bit_vector.hpp"
#include "scdram/encoding.hpp"
#include "scdram/rnd_selects.hpp"

namespace scdram {

enum class Sign : int { Positive = 1, Negative = -1 };

/// Binary-domain fixed-point value with explicit scale bookkeeping.
///
/// `mantissa / reference_length` is what the underlying bits encode. Each
/// 16-input MUX stage divides the true quantity by 16 and records that as
/// scale_log2 -= 4, so the true quantity is
///   sign * mantissa / reference_length * 2^(-scale_log2).
struct ScaledValue {
  std::uint64_t mantissa = 0;
  int scale_log2 = 0;
  std::size_t reference_length = BitVector::kDefaultLength;
  Sign sign = Sign::Positive;

  /// Fraction encoded by the bits, with sign: sign * mantissa / reference_length.
  double scaled() const noexcept;
  /// True quantity with the MUX scaling undone.
  double value() const noexcept;
  bool is_zero() const noexcept { return mantissa == 0; }
  /// Field-wise equality; use value() to compare across scales.
  friend bool operator==(const ScaledValue&, const ScaledValue&) = default;
};

/// Bitwise AND; approximates value(a) * value(b). Throws LengthMismatch.
BitVector sc_mul(const BitVector& a, const BitVector& b);

/// 16-input scaled accumulation: lane j of the output is inputs[rnd[j]][j].
/// Throws InvalidArgument unless exactly 16 inputs are given, and
/// LengthMismatch when input lengths differ or rnd.lanes() != length.
BitVector sc_acc16(std::span<const BitVector> inputs, const RndSelects& rnd);

/// Wraps a MUX-tree output: mantissa = popcount, scale_log2 = -4 * mux_depth.
ScaledValue to_scaled_value(const BitVector& v, int mux_depth, Sign sign = Sign::Positive);

}  // namespace scdram
