#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace scdram {

/// Fixed-length unipolar stochastic number. The represented value is the
/// fraction of set bits. Bits past `length()` in the last word stay zero.
class BitVector {
 public:
  static constexpr std::size_t kDefaultLength = 512;

  explicit BitVector(std::size_t length = kDefaultLength);

  static BitVector zeros(std::size_t length) { return BitVector(length); }
  static BitVector ones(std::size_t length);

  std::size_t length() const noexcept { return length_; }
  bool test(std::size_t i) const;
  void set(std::size_t i, bool bit = true);

  std::size_t popcount() const noexcept;
  double value() const noexcept {
    return static_cast<double>(popcount()) / static_cast<double>(length_);
  }
  bool none() const noexcept { return popcount() == 0; }

  std::span<const std::uint64_t> words() const noexcept { return words_; }
  std::span<std::uint64_t> mutable_words() noexcept { return words_; }

  BitVector& operator&=(const BitVector& other);
  BitVector& operator|=(const BitVector& other);

  /// Copies `length` bits starting at `offset` into a new vector.
  BitVector slice(std::size_t offset, std::size_t length) const;
  /// Overwrites bits [offset, offset + src.length()) with `src`.
  void assign(std::size_t offset, const BitVector& src);

  /// '0'/'1' characters, bit 0 first.
  std::string to_string() const;

  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  void clear_tail() noexcept;

  std::size_t length_;
  std::vector<std::uint64_t> words_;
};

}  // namespace scdram
