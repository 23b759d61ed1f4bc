#pragma once

#include <bit>
#include <cstdint>
#include <vector>

#include "wotsplus/bitstring.hpp"
#include "wotsplus/errors.hpp"

namespace wotsplus {

/// Derived scheme constants.
///
/// n  security parameter (bits of a chain node)
/// m  message length (bits)
/// w  Winternitz parameter; base of the digit representation, chains have
///    w-1 steps
/// l1 message digit count   = ceil(m / log2(w))
/// l2 checksum digit count  = floor(log2(l1*(w-1)) / log2(w)) + 1
/// l  total chain count     = l1 + l2
struct Params {
  std::uint32_t n = 0;
  std::uint32_t m = 0;
  std::uint32_t w = 0;
  std::uint32_t log2_w = 0;
  std::uint32_t l1 = 0;
  std::uint32_t l2 = 0;
  std::uint32_t l = 0;

  bool operator==(const Params&) const = default;

  std::uint64_t checksum_max() const { return std::uint64_t{l1} * (w - 1); }
};

/// Base-w digit vector b_1..b_l: l1 message digits followed by l2 checksum
/// digits, all MSB-first.
struct BaseWDigits {
  std::vector<std::uint32_t> digits;
};

/// Validates (n, m, w) and derives the chain counts.
///
/// w is restricted to powers of two so that log2(w) is integral and digit
/// extraction is a bit slice; l2 is computed with integer arithmetic
/// (floor_log2 / log2(w)), which agrees with the real-valued formula for
/// every power-of-two w.
inline Params derive_params(std::uint32_t n, std::uint32_t m, std::uint32_t w) {
  if (w < 2 || !std::has_single_bit(w)) {
    throw InvalidParameter("w must be a power of two >= 2");
  }
  if (w > (1u << 15)) throw InvalidParameter("w too large (max 2^15)");
  const std::uint32_t e = static_cast<std::uint32_t>(std::bit_width(w) - 1);
  if (n < 8) throw InvalidParameter("n below the floor of 8 bits");
  if (n > 65535 || m > 65535) throw InvalidParameter("n and m must fit 16 bits");
  if (m < e) throw InvalidParameter("m must be at least log2(w) bits");

  Params p;
  p.n = n;
  p.m = m;
  p.w = w;
  p.log2_w = e;
  p.l1 = (m + e - 1) / e;
  const std::uint64_t c_max = std::uint64_t{p.l1} * (w - 1);
  p.l2 = (static_cast<std::uint32_t>(std::bit_width(c_max)) - 1) / e + 1;
  p.l = p.l1 + p.l2;
  return p;
}

/// Base-w representation of `message` followed by the checksum
/// C = sum(w-1-b_i), left-padded with zero digits to l2 positions.
inline BaseWDigits encode(const BitString& message, const Params& p) {
  if (message.bits() != p.m) throw InvalidLength("message must be exactly m bits");

  BaseWDigits out;
  out.digits.resize(p.l, 0);

  // Message digits, MSB-first. The value is left-padded with zero bits to
  // l1 * log2(w) positions when log2(w) does not divide m.
  const std::uint32_t pad = p.l1 * p.log2_w - p.m;
  for (std::uint32_t i = 0; i < p.l1; ++i) {
    std::uint32_t digit = 0;
    for (std::uint32_t j = 0; j < p.log2_w; ++j) {
      const std::uint32_t slot = i * p.log2_w + j;
      const bool bit = slot < pad ? false : message.bit(slot - pad);
      digit = (digit << 1) | (bit ? 1u : 0u);
    }
    out.digits[i] = digit;
  }

  std::uint64_t checksum = 0;
  for (std::uint32_t i = 0; i < p.l1; ++i) checksum += (p.w - 1) - out.digits[i];
  for (std::uint32_t i = p.l2; i-- > 0;) {
    out.digits[p.l1 + i] = static_cast<std::uint32_t>(checksum % p.w);
    checksum /= p.w;
  }
  // l2 positions always suffice by construction of the parameter set.
  if (checksum != 0) throw InternalInconsistency("checksum overflowed l2 digits");
  return out;
}

}  // namespace wotsplus
