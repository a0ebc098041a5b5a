#include "scdram/processing_element.hpp"

#include <algorithm>

#include "scdram/error.hpp"
#include "scdram/seed.hpp"

namespace scdram {

using G = SubarrayGeometry;

std::size_t row_position(RowLayout layout, std::size_t operand, std::size_t bit) noexcept {
  return layout == RowLayout::Contiguous ? operand * G::kOperandBits + bit
                                         : operand + G::kOperandsPerRow * bit;
}

BitVector pack_row(std::span<const BitVector> operands, RowLayout layout) {
  if (operands.size() != G::kOperandsPerRow) {
    throw InvalidArgument("a row holds exactly 16 operands");
  }
  BitVector row(G::kRowBits);
  for (std::size_t i = 0; i < operands.size(); ++i) {
    if (operands[i].length() != G::kOperandBits) {
      throw LengthMismatch("row operands must be 512 bits");
    }
    if (layout == RowLayout::Contiguous) {
      row.assign(i * G::kOperandBits, operands[i]);
    } else {
      for (std::size_t j = 0; j < G::kOperandBits; ++j) {
        if (operands[i].test(j)) row.set(row_position(layout, i, j));
      }
    }
  }
  return row;
}

BitVector unpack_operand(const BitVector& row, std::size_t index, RowLayout layout) {
  if (index >= G::kOperandsPerRow) throw InvalidArgument("operand slot out of range");
  if (layout == RowLayout::Contiguous) return row.slice(index * G::kOperandBits, G::kOperandBits);
  BitVector out(G::kOperandBits);
  for (std::size_t j = 0; j < G::kOperandBits; ++j) {
    if (row.test(row_position(layout, index, j))) out.set(j);
  }
  return out;
}

std::string_view to_string(MocKind kind) noexcept {
  switch (kind) {
    case MocKind::RowCloneCopy: return "RowCloneCopy";
    case MocKind::TripleRowActivateAnd: return "TripleRowActivateAnd";
    case MocKind::ReadToSA: return "ReadToSA";
    case MocKind::MuxAccWriteBack: return "MuxAccWriteBack";
    case MocKind::PlainWrite: return "PlainWrite";
  }
  return "?";
}

void write_trace_jsonl(std::ostream& os, std::span<const MocEvent> trace) {
  auto row = [&os](const std::optional<RowId>& r) {
    if (r) {
      os << *r;
    } else {
      os << "null";
    }
  };
  for (const auto& e : trace) {
    os << "{\"seq\":" << e.seq << ",\"kind\":\"" << to_string(e.kind) << "\",\"src\":";
    row(e.src);
    os << ",\"dst\":";
    row(e.dst);
    os << ",\"t_ns\":" << e.start_ns << "}\n";
  }
}

ProcessingElement::ProcessingElement(RndSelects rnd, PeOptions options)
    : options_(options), rnd_(std::move(rnd)), rows_(G::kRows, BitVector(G::kRowBits)) {
  if (rnd_.lanes() != G::kOperandBits) {
    throw LengthMismatch("a PE needs one RND select per MUX (512)");
  }
}

ProcessingElement::ProcessingElement(std::uint64_t seed, PeOptions options)
    : ProcessingElement(gen_rnd_selects(seed), options) {
  seed_ = seed;
}

void ProcessingElement::check_row(RowId r) const {
  if (r >= G::kRows) throw InvalidArgument("row id " + std::to_string(r) + " out of range");
}

const BitVector& ProcessingElement::row(RowId r) const {
  check_row(r);
  return rows_[r];
}

MocEvent ProcessingElement::record(MocKind kind, std::optional<RowId> src, std::optional<RowId> dst) {
  MocEvent e{trace_.size(), kind, src, dst, now_ns_};
  trace_.push_back(e);
  now_ns_ += options_.timing.moc_ns;
  return e;
}

void ProcessingElement::write_row(RowId r, const BitVector& bits) {
  check_row(r);
  if (r == G::kRow3) throw PreconditionViolation("Row 3 is written only by triple-row activation");
  if (bits.length() != G::kRowBits) throw LengthMismatch("row writes must be 8192 bits");
  rows_[r] = bits;
  record(MocKind::PlainWrite, std::nullopt, r);
}

void ProcessingElement::load_operands(RowId r, std::span<const BitVector> operands) {
  write_row(r, pack_row(operands, options_.layout));
}

BitVector ProcessingElement::operand(RowId r, std::size_t index) const {
  return unpack_operand(row(r), index, options_.layout);
}

MocEvent ProcessingElement::row_clone(RowId src, RowId dst) {
  check_row(src);
  check_row(dst);
  if (src == dst) throw InvalidArgument("RowClone source and destination are the same row");
  if (dst == G::kRow3) throw PreconditionViolation("RowClone onto Row 3 is not allowed");
  rows_[dst] = rows_[src];
  return record(MocKind::RowCloneCopy, src, dst);
}

MocEvent ProcessingElement::triple_row_activate_and() {
  if (!rows_[G::kRow3].none()) {
    throw PreconditionViolation("triple-row activation requires Row 3 to hold all zeros");
  }
  // MAJ(r1, r2, 0) = r1 AND r2; charge sharing leaves the result in all three rows.
  BitVector result = rows_[G::kRow1];
  result &= rows_[G::kRow2];
  rows_[G::kRow1] = result;
  rows_[G::kRow2] = result;
  rows_[G::kRow3] = std::move(result);
  return record(MocKind::TripleRowActivateAnd, std::nullopt, G::kRow3);
}

MocEvent ProcessingElement::read_to_sense_amps() {
  latch_.bits = rows_[G::kRow3];
  latch_.valid = true;
  // Row 3 is re-zeroed here so the next F_MAC's precondition holds; no MOC charged.
  rows_[G::kRow3] = BitVector(G::kRowBits);
  return record(MocKind::ReadToSA, G::kRow3, std::nullopt);
}

MocEvent ProcessingElement::mux_acc_write_back(RowId dst, std::size_t segment) {
  check_row(dst);
  if (G::is_reserved(dst)) throw PreconditionViolation("F_MAC results cannot overwrite reserved rows");
  if (segment >= G::kOperandsPerRow) throw InvalidArgument("write-back segment out of range");
  if (!latch_.valid) throw PreconditionViolation("MUX accumulation needs a valid sense-amp latch");

  std::array<BitVector, G::kOperandsPerRow> inputs;
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    inputs[i] = unpack_operand(latch_.bits, i, options_.layout);
  }
  const BitVector out = sc_acc16(inputs, rnd_);

  BitVector& row = rows_[dst];
  if (options_.layout == RowLayout::Contiguous) {
    row.assign(segment * G::kOperandBits, out);
  } else {
    for (std::size_t j = 0; j < G::kOperandBits; ++j) row.set(row_position(options_.layout, segment, j), out.test(j));
  }
  latch_.valid = false;  // precharge
  return record(MocKind::MuxAccWriteBack, std::nullopt, dst);
}

FmacResult ProcessingElement::exec_fmac(RowId src_n, RowId src_m, RowId dst, std::size_t segment) {
  for (RowId r : {src_n, src_m, dst}) {
    check_row(r);
    if (G::is_reserved(r)) {
      throw PreconditionViolation("F_MAC operand row " + std::to_string(r) + " overlaps a reserved row");
    }
  }
  const std::size_t first = trace_.size();
  row_clone(src_n, G::kRow1);
  row_clone(src_m, G::kRow2);
  triple_row_activate_and();
  read_to_sense_amps();
  mux_acc_write_back(dst, segment);

  ++fmac_count_;
  if (options_.relatch) {
    rnd_ = gen_rnd_selects(derive_seed(seed_, kStreamRelatch, fmac_count_));
  }

  FmacResult result;
  result.output = operand(dst, segment);
  result.value = to_scaled_value(result.output, 1);
  result.events = std::span<const MocEvent>(trace_).subspan(first, 5);
  return result;
}

PopCountResult ProcessingElement::pop_count(RowId r, std::size_t segment) {
  PopCountResult pc;
  pc.count = decode_s2b(operand(r, segment));
  pc.start_ns = std::max(now_ns_, pc_busy_until_);
  pc.done_ns = pc.start_ns + options_.timing.pc_ns;
  pc_busy_until_ = pc.done_ns;
  return pc;
}

std::size_t ProcessingElement::compute_moc_count() const noexcept {
  return static_cast<std::size_t>(
      std::count_if(trace_.begin(), trace_.end(), [](const MocEvent& e) { return e.is_compute(); }));
}

}  // namespace scdram
