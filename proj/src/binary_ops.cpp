#include "scdram/error.hpp"
#include "scdram/processing_element.hpp"

namespace scdram {

namespace {

using u128 = unsigned __int128;

// round-half-even(num / den)
std::uint64_t round_ratio(u128 num, u128 den) {
  u128 q = num / den;
  const u128 r = num % den;
  if (2 * r > den || (2 * r == den && (q & 1U))) ++q;
  return q > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(q);
}

}  // namespace

ScaledValue relu_binary(const ScaledValue& x, unsigned width) {
  if (width == 0 || width > 32) throw InvalidArgument("re-quantization width must be in [1, 32]");
  ScaledValue out{0, 0, std::size_t{1} << width, Sign::Positive};
  if (x.sign == Sign::Negative || x.mantissa == 0) return out;

  // code = round(mantissa * 2^(width - scale_log2) / reference_length)
  const int shift = static_cast<int>(width) - x.scale_log2;
  u128 num = x.mantissa;
  u128 den = x.reference_length;
  if (shift >= 0) {
    if (shift > 60) {
      num = ~u128{0} / 2;  // saturates below
    } else {
      num <<= shift;
    }
  } else {
    den = -shift > 60 ? ~u128{0} / 2 : den << -shift;
  }
  const std::uint64_t max_code = (std::uint64_t{1} << width) - 1;
  const std::uint64_t code = round_ratio(num, den);
  out.mantissa = code > max_code ? max_code : code;
  return out;
}

ScaledValue max_pool_binary(std::span<const ScaledValue> xs, std::size_t window) {
  if (window == 0) throw InvalidArgument("pooling window must be positive");
  if (xs.size() != window) throw InvalidArgument("pooling input count differs from the window");
  const ScaledValue* best = &xs[0];
  for (const auto& x : xs) {
    if (x.scale_log2 != xs[0].scale_log2 || x.reference_length != xs[0].reference_length) {
      throw ValidationError("max pooling over values on different scales");
    }
    const auto key = [](const ScaledValue& v) {
      const auto m = static_cast<__int128>(v.mantissa);
      return v.sign == Sign::Negative ? -m : m;
    };
    if (key(x) > key(*best)) best = &x;
  }
  return *best;
}

}  // namespace scdram
