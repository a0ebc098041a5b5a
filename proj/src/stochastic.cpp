#include "scdram/stochastic.hpp"

#include <cmath>

#include "scdram/error.hpp"

namespace scdram {

double ScaledValue::scaled() const noexcept {
  return static_cast<int>(sign) * static_cast<double>(mantissa) /
         static_cast<double>(reference_length);
}

double ScaledValue::value() const noexcept { return std::ldexp(scaled(), -scale_log2); }

BitVector sc_mul(const BitVector& a, const BitVector& b) {
  if (a.length() != b.length()) throw LengthMismatch("sc_mul operands differ in length");
  BitVector out = a;
  out &= b;
  return out;
}

BitVector sc_acc16(std::span<const BitVector> inputs, const RndSelects& rnd) {
  if (inputs.size() != RndSelects::kFanIn) {
    throw InvalidArgument("sc_acc16 needs exactly 16 inputs, got " + std::to_string(inputs.size()));
  }
  const std::size_t length = inputs[0].length();
  for (const auto& in : inputs) {
    if (in.length() != length) throw LengthMismatch("sc_acc16 inputs differ in length");
  }
  if (rnd.lanes() != length) {
    throw LengthMismatch("RND select count " + std::to_string(rnd.lanes()) +
                         " does not match operand length " + std::to_string(length));
  }
  BitVector out(length);
  for (unsigned i = 0; i < RndSelects::kFanIn; ++i) {
    BitVector picked = inputs[i];
    picked &= rnd.lane_mask(i);
    out |= picked;
  }
  return out;
}

ScaledValue to_scaled_value(const BitVector& v, int mux_depth, Sign sign) {
  if (mux_depth < 0) throw InvalidArgument("mux depth must be non-negative");
  return ScaledValue{v.popcount(), -4 * mux_depth, v.length(), sign};
}

}  // namespace scdram
