#include "scdram/bit_vector.hpp"

#include <bit>

#include "scdram/error.hpp"

namespace scdram {

namespace {
constexpr std::size_t kWordBits = 64;

std::size_t word_count(std::size_t bits) { return (bits + kWordBits - 1) / kWordBits; }
}  // namespace

BitVector::BitVector(std::size_t length) : length_(length), words_(word_count(length), 0) {
  if (length == 0) throw InvalidArgument("bit-vector length must be positive");
}

BitVector BitVector::ones(std::size_t length) {
  BitVector v(length);
  for (auto& w : v.words_) w = ~std::uint64_t{0};
  v.clear_tail();
  return v;
}

bool BitVector::test(std::size_t i) const {
  if (i >= length_) throw InvalidArgument("bit index out of range");
  return (words_[i / kWordBits] >> (i % kWordBits)) & 1U;
}

void BitVector::set(std::size_t i, bool bit) {
  if (i >= length_) throw InvalidArgument("bit index out of range");
  const std::uint64_t mask = std::uint64_t{1} << (i % kWordBits);
  if (bit) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

std::size_t BitVector::popcount() const noexcept {
  std::size_t n = 0;
  for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
  return n;
}

BitVector& BitVector::operator&=(const BitVector& other) {
  if (other.length_ != length_) throw LengthMismatch("AND of bit-vectors with different lengths");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

BitVector& BitVector::operator|=(const BitVector& other) {
  if (other.length_ != length_) throw LengthMismatch("OR of bit-vectors with different lengths");
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

BitVector BitVector::slice(std::size_t offset, std::size_t length) const {
  if (offset + length > length_) throw InvalidArgument("slice exceeds bit-vector length");
  BitVector out(length);
  if (offset % kWordBits == 0 && length % kWordBits == 0) {
    for (std::size_t w = 0; w < out.words_.size(); ++w) out.words_[w] = words_[offset / kWordBits + w];
    return out;
  }
  for (std::size_t i = 0; i < length; ++i) {
    if (test(offset + i)) out.set(i);
  }
  return out;
}

void BitVector::assign(std::size_t offset, const BitVector& src) {
  if (offset + src.length_ > length_) throw InvalidArgument("assignment exceeds bit-vector length");
  if (offset % kWordBits == 0 && src.length_ % kWordBits == 0) {
    for (std::size_t w = 0; w < src.words_.size(); ++w) words_[offset / kWordBits + w] = src.words_[w];
    return;
  }
  for (std::size_t i = 0; i < src.length_; ++i) set(offset + i, src.test(i));
}

std::string BitVector::to_string() const {
  std::string s(length_, '0');
  for (std::size_t i = 0; i < length_; ++i) {
    if (test(i)) s[i] = '1';
  }
  return s;
}

void BitVector::clear_tail() noexcept {
  const std::size_t rem = length_ % kWordBits;
  if (rem != 0) words_.back() &= (std::uint64_t{1} << rem) - 1;
}

}  // namespace scdram
