#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string_view>
#include <vector>

#include "scdram/bit_vector.hpp"
#include "scdram/rnd_selects.hpp"
#include "scdram/stochastic.hpp"

namespace scdram {

using RowId = std::uint32_t;

/// Geometry of one subarray: 32 mats of 256x256 give 256 rows of 8 Kb.
struct SubarrayGeometry {
  static constexpr std::size_t kRows = 256;
  static constexpr std::size_t kRowBits = 8192;
  static constexpr std::size_t kOperandsPerRow = 16;
  static constexpr std::size_t kOperandBits = kRowBits / kOperandsPerRow;  // 512

  static constexpr RowId kRow1 = kRows - 3;  // multiplicand N
  static constexpr RowId kRow2 = kRows - 2;  // multiplicand M
  static constexpr RowId kRow3 = kRows - 1;  // AND result, zero between F_MACs

  static constexpr bool is_reserved(RowId r) noexcept { return r >= kRow1 && r < kRows; }
};

/// How the 16 operands of a row map onto sense-amp positions.
///  Contiguous: bit j of operand i sits at 512*i + j.
///  Strided:    bit j of operand i sits at i + 16*j (16 adjacent S/As per MUX).
/// MUX j always sees bit j of all 16 operands, so results do not depend on
/// the layout.
enum class RowLayout { Contiguous, Strided };

std::size_t row_position(RowLayout layout, std::size_t operand, std::size_t bit) noexcept;

/// Packs 16 operands of 512 bits into an 8 Kb row.
BitVector pack_row(std::span<const BitVector> operands, RowLayout layout);
/// Extracts operand `index` from an 8 Kb row.
BitVector unpack_operand(const BitVector& row, std::size_t index, RowLayout layout);

enum class MocKind { RowCloneCopy, TripleRowActivateAnd, ReadToSA, MuxAccWriteBack, PlainWrite };

std::string_view to_string(MocKind kind) noexcept;

struct MocEvent {
  std::uint64_t seq = 0;
  MocKind kind = MocKind::PlainWrite;
  std::optional<RowId> src;
  std::optional<RowId> dst;
  double start_ns = 0.0;

  bool is_compute() const noexcept { return kind != MocKind::PlainWrite; }
};

/// Writes one JSON object per line:
///   {"seq":N,"kind":"...","src":R|null,"dst":R|null,"t_ns":T}
void write_trace_jsonl(std::ostream& os, std::span<const MocEvent> trace);

struct SenseAmpLatch {
  BitVector bits{SubarrayGeometry::kRowBits};
  bool valid = false;
};

struct PeTiming {
  double moc_ns = 17.0;
  double pc_ns = 256.0;
};

struct PeOptions {
  PeTiming timing{};
  RowLayout layout = RowLayout::Contiguous;
  /// Regenerate the RND selects after every F_MAC (error studies only).
  bool relatch = false;
};

struct FmacResult {
  BitVector output{SubarrayGeometry::kOperandBits};
  ScaledValue value;
  std::span<const MocEvent> events;  // the five MOCs, valid until the next PE call
};

struct PopCountResult {
  std::uint64_t count = 0;
  double start_ns = 0.0;
  double done_ns = 0.0;
};

/// One subarray plus its FPU, simulated at MOC granularity.
///
/// The simulated clock advances by moc_ns for every MOC. Pop counts run on
/// the FPU's serial counter, off the MOC path: they start no earlier than the
/// counter is free and never stall the clock.
class ProcessingElement {
 public:
  explicit ProcessingElement(RndSelects rnd, PeOptions options = {});
  /// Uses gen_rnd_selects(seed); relatch mode derives later selects from it.
  explicit ProcessingElement(std::uint64_t seed, PeOptions options = {});

  const BitVector& row(RowId r) const;
  void write_row(RowId r, const BitVector& bits);  // PlainWrite MOC
  void load_operands(RowId r, std::span<const BitVector> operands);
  BitVector operand(RowId r, std::size_t index) const;

  MocEvent row_clone(RowId src, RowId dst);
  MocEvent triple_row_activate_and();
  MocEvent read_to_sense_amps();
  MocEvent mux_acc_write_back(RowId dst, std::size_t segment);

  /// The full 5-MOC multiply-accumulate. The MUX output lands in operand
  /// slot `segment` of row `dst`.
  FmacResult exec_fmac(RowId src_n, RowId src_m, RowId dst, std::size_t segment = 0);

  /// S-to-B of operand slot `segment` of row `r` on the serial counter.
  PopCountResult pop_count(RowId r, std::size_t segment);

  const RndSelects& rnd() const noexcept { return rnd_; }
  const SenseAmpLatch& latch() const noexcept { return latch_; }
  std::span<const MocEvent> trace() const noexcept { return trace_; }
  std::size_t compute_moc_count() const noexcept;
  double now_ns() const noexcept { return now_ns_; }
  double popcounter_busy_until() const noexcept { return pc_busy_until_; }
  const PeOptions& options() const noexcept { return options_; }

 private:
  MocEvent record(MocKind kind, std::optional<RowId> src, std::optional<RowId> dst);
  void check_row(RowId r) const;

  std::uint64_t seed_ = 0;
  std::uint64_t fmac_count_ = 0;
  PeOptions options_;
  RndSelects rnd_;
  std::vector<BitVector> rows_;
  SenseAmpLatch latch_;
  std::vector<MocEvent> trace_;
  double now_ns_ = 0.0;
  double pc_busy_until_ = 0.0;
};

// ---------------------------------------------------------------------------
// Dot products beyond 16 operands

struct DotProductResult {
  ScaledValue value;       // scale_log2 = -4, reference_length = 512
  std::size_t positive_groups = 0;
  std::size_t negative_groups = 0;
  std::size_t compute_mocs = 0;

  std::size_t groups() const noexcept { return positive_groups + negative_groups; }
};

/// Signed dot product through F_MAC groups.
///
/// Inputs are sign-magnitude integers with |x| < 2^width; `a` is encoded
/// Thermometer and `b` ClockDivision. Products go to a positive or a negative
/// rail by sign (pairs with a zero factor are dropped), each rail is packed
/// greedily in input order into 16-operand groups with zero padding, and every
/// group runs one exec_fmac followed by a pop count. Group counts are summed
/// per rail in binary and the rails subtracted, so the result approximates
/// sum(a_i * b_i) / 2^(2*width).
DotProductResult dot_product(ProcessingElement& pe, std::span<const std::int32_t> a,
                             std::span<const std::int32_t> b, unsigned width = 8);

// ---------------------------------------------------------------------------
// Binary-domain FPU functions

/// ReLU in the binary domain followed by round-half-even re-quantization to
/// `width` bits, saturating at (2^width - 1) / 2^width. The result has
/// scale_log2 = 0 and reference_length = 2^width, so mantissa is the code
/// that feeds the next B-to-S conversion.
ScaledValue relu_binary(const ScaledValue& x, unsigned width = 8);

/// Maximum by represented value. Throws InvalidArgument when xs.size() !=
/// window and ValidationError when the values do not share one scale.
ScaledValue max_pool_binary(std::span<const ScaledValue> xs, std::size_t window);

}  // namespace scdram
