#pragma once

#include <optional>

#include "wotsplus/hash_family.hpp"

namespace wotsplus {

namespace detail {
inline void require_toy_domain(const FamilyKey& key) {
  if (key.spec.n_bits > kToyMaxBits) {
    throw DomainTooLarge("exhaustive search limited to n <= 20");
  }
}
}  // namespace detail

/// Exhaustive preimage search: any x with f_k(x) = y, scanning the whole
/// n-bit domain in ascending order. Test oracle for the toy family.
inline std::optional<BitString> brute_force_preimage(const FamilyKey& key, const BitString& y,
                                                     EvalCounter* evals = nullptr) {
  detail::require_toy_domain(key);
  if (y.bits() != key.spec.n_bits) throw InvalidLength("target must be n bits");
  const std::uint64_t domain = std::uint64_t{1} << key.spec.n_bits;
  for (std::uint64_t v = 0; v < domain; ++v) {
    const BitString x = BitString::from_uint(v, key.spec.n_bits);
    add_evals(evals, 1);
    if (evaluate(key, x) == y) return x;
  }
  return std::nullopt;
}

/// Exhaustive second-preimage search: any x' != x with f_k(x') = f_k(x).
inline std::optional<BitString> brute_force_second_preimage(const FamilyKey& key,
                                                            const BitString& x,
                                                            EvalCounter* evals = nullptr) {
  detail::require_toy_domain(key);
  if (x.bits() != key.spec.n_bits) throw InvalidLength("input must be n bits");
  add_evals(evals, 1);
  const BitString target = evaluate(key, x);
  const std::uint64_t domain = std::uint64_t{1} << key.spec.n_bits;
  for (std::uint64_t v = 0; v < domain; ++v) {
    const BitString candidate = BitString::from_uint(v, key.spec.n_bits);
    if (candidate == x) continue;
    add_evals(evals, 1);
    if (evaluate(key, candidate) == target) return candidate;
  }
  return std::nullopt;
}

}  // namespace wotsplus
