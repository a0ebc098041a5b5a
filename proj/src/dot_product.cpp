#include <array>
#include <cstdlib>
#include <vector>

#include "scdram/encoding.hpp"
#include "scdram/error.hpp"
#include "scdram/processing_element.hpp"

namespace scdram {

namespace {

using G = SubarrayGeometry;

constexpr RowId kRowN = 0;
constexpr RowId kRowM = 1;
constexpr RowId kRowOut = 2;

struct Pair {
  std::uint32_t a;
  std::uint32_t b;
};

// Runs one rail through F_MAC groups; returns the summed group pop counts.
std::uint64_t run_rail(ProcessingElement& pe, const std::vector<Pair>& rail, unsigned width,
                       std::size_t& groups) {
  std::uint64_t total = 0;
  for (std::size_t base = 0; base < rail.size(); base += G::kOperandsPerRow) {
    std::array<BitVector, G::kOperandsPerRow> n_ops;
    std::array<BitVector, G::kOperandsPerRow> m_ops;
    for (std::size_t i = 0; i < G::kOperandsPerRow; ++i) {
      const std::size_t k = base + i;
      const std::uint32_t a = k < rail.size() ? rail[k].a : 0;
      const std::uint32_t b = k < rail.size() ? rail[k].b : 0;
      n_ops[i] = encode_b2s(a, G::kOperandBits, EncodingScheme::thermometer(), width);
      m_ops[i] = encode_b2s(b, G::kOperandBits, EncodingScheme::clock_division(), width);
    }
    pe.load_operands(kRowN, n_ops);
    pe.load_operands(kRowM, m_ops);
    pe.exec_fmac(kRowN, kRowM, kRowOut, 0);
    total += pe.pop_count(kRowOut, 0).count;
    ++groups;
  }
  return total;
}

}  // namespace

DotProductResult dot_product(ProcessingElement& pe, std::span<const std::int32_t> a,
                             std::span<const std::int32_t> b, unsigned width) {
  if (a.empty() || b.empty()) throw InvalidArgument("dot product of empty vectors");
  if (a.size() != b.size()) throw LengthMismatch("dot product operands differ in length");
  if (width == 0 || G::kOperandBits % (std::size_t{1} << width) != 0) {
    throw LengthMismatch("512-bit operands cannot encode width " + std::to_string(width));
  }
  const std::int64_t limit = std::int64_t{1} << width;

  std::vector<Pair> positive;
  std::vector<Pair> negative;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t x = a[i];
    const std::int64_t y = b[i];
    if (std::llabs(x) >= limit || std::llabs(y) >= limit) {
      throw InvalidArgument("dot product operand magnitude exceeds the encoding width");
    }
    if (x == 0 || y == 0) continue;
    const Pair p{static_cast<std::uint32_t>(std::llabs(x)), static_cast<std::uint32_t>(std::llabs(y))};
    ((x < 0) != (y < 0) ? negative : positive).push_back(p);
  }

  const std::size_t mocs_before = pe.compute_moc_count();
  DotProductResult r;
  const std::uint64_t pos = run_rail(pe, positive, width, r.positive_groups);
  const std::uint64_t neg = run_rail(pe, negative, width, r.negative_groups);
  r.compute_mocs = pe.compute_moc_count() - mocs_before;

  r.value.scale_log2 = -4;
  r.value.reference_length = G::kOperandBits;
  if (pos >= neg) {
    r.value.mantissa = pos - neg;
    r.value.sign = Sign::Positive;
  } else {
    r.value.mantissa = neg - pos;
    r.value.sign = Sign::Negative;
  }
  return r;
}

}  // namespace scdram
