#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wotsplus/errors.hpp"

namespace wotsplus {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::size_t byte_length(std::uint32_t bits) {
  return (static_cast<std::size_t>(bits) + 7) / 8;
}

/// Fixed-width bit string.
///
/// Stored big-endian in ceil(bits/8) bytes; the unused high bits of byte 0
/// are always zero, so byte-wise equality is value equality. This one type
/// carries n-bit chain nodes, bitmasks and m-bit messages.
class BitString {
 public:
  BitString() = default;

  explicit BitString(std::uint32_t bits) : bits_(bits), bytes_(byte_length(bits), 0) {}

  static BitString from_bytes(std::span<const std::uint8_t> bytes, std::uint32_t bits) {
    if (bytes.size() != byte_length(bits)) {
      throw InvalidLength("byte buffer does not match bit width");
    }
    BitString out(bits);
    std::copy(bytes.begin(), bytes.end(), out.bytes_.begin());
    if (!out.has_canonical_padding()) {
      throw InvalidLength("nonzero padding bits above the value");
    }
    return out;
  }

  /// Widths up to 64 bits; used by the toy brute-force enumerations.
  static BitString from_uint(std::uint64_t value, std::uint32_t bits) {
    if (bits == 0 || bits > 64) throw InvalidLength("from_uint supports 1..64 bits");
    if (bits < 64 && (value >> bits) != 0) throw OutOfRange("value does not fit in bit width");
    BitString out(bits);
    for (std::size_t i = out.bytes_.size(); i-- > 0;) {
      out.bytes_[i] = static_cast<std::uint8_t>(value & 0xff);
      value >>= 8;
    }
    return out;
  }

  std::uint64_t to_uint() const {
    if (bits_ == 0 || bits_ > 64) throw InvalidLength("to_uint supports 1..64 bits");
    std::uint64_t value = 0;
    for (std::uint8_t b : bytes_) value = (value << 8) | b;
    return value;
  }

  std::uint32_t bits() const noexcept { return bits_; }
  bool empty() const noexcept { return bits_ == 0; }
  const Bytes& bytes() const noexcept { return bytes_; }

  /// Bit i of the value, i = 0 addressing the most significant bit.
  bool bit(std::uint32_t i) const {
    if (i >= bits_) throw OutOfRange("bit index out of range");
    const std::uint32_t slot = 8 * static_cast<std::uint32_t>(bytes_.size()) - bits_ + i;
    return (bytes_[slot / 8] >> (7 - slot % 8)) & 1;
  }

  void flip_bit(std::uint32_t i) {
    if (i >= bits_) throw OutOfRange("bit index out of range");
    const std::uint32_t slot = 8 * static_cast<std::uint32_t>(bytes_.size()) - bits_ + i;
    bytes_[slot / 8] ^= static_cast<std::uint8_t>(1u << (7 - slot % 8));
  }

  BitString& operator^=(const BitString& other) {
    if (other.bits_ != bits_) throw InvalidLength("xor of mismatched widths");
    for (std::size_t i = 0; i < bytes_.size(); ++i) bytes_[i] ^= other.bytes_[i];
    return *this;
  }

  friend BitString operator^(BitString lhs, const BitString& rhs) {
    lhs ^= rhs;
    return lhs;
  }

  bool operator==(const BitString&) const = default;

  std::string hex() const {
    static constexpr char digits[] = "0123456789abcdef";
    std::string out;
    out.reserve(bytes_.size() * 2);
    for (std::uint8_t b : bytes_) {
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 0xf]);
    }
    return out;
  }

  /// Zeroes the padding bits above the value. Used after filling the raw
  /// buffer (random sampling, hash truncation).
  void mask_padding() {
    if (bits_ % 8 != 0 && !bytes_.empty()) {
      bytes_[0] &= static_cast<std::uint8_t>(0xff >> (8 - bits_ % 8));
    }
  }

  bool has_canonical_padding() const {
    if (bits_ % 8 == 0 || bytes_.empty()) return true;
    return (bytes_[0] & ~static_cast<std::uint8_t>(0xff >> (8 - bits_ % 8))) == 0;
  }

  std::uint8_t* data() noexcept { return bytes_.data(); }
  const std::uint8_t* data() const noexcept { return bytes_.data(); }
  std::size_t size_bytes() const noexcept { return bytes_.size(); }

 private:
  std::uint32_t bits_ = 0;
  Bytes bytes_;
};

}  // namespace wotsplus
