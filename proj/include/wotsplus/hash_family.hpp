#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <vector>

#include "wotsplus/bitstring.hpp"
#include "wotsplus/detail/sha256.hpp"
#include "wotsplus/errors.hpp"
#include "wotsplus/params.hpp"
#include "wotsplus/rng.hpp"

namespace wotsplus {

/// Domain separation byte for family evaluation:
///   f_k(x) = SHA-256(0x46 ‖ k ‖ x) truncated to the first n bits.
/// k is always 32 bytes; x is the canonical big-endian encoding of an n-bit
/// string. Fixed here bit-exactly so independent implementations agree.
inline constexpr std::uint8_t kFamilyDomainTag = 0x46;

inline constexpr std::size_t kFamilyKeyBytes = 32;

inline constexpr std::uint32_t kToyMaxBits = 20;

enum class FamilyVariant : std::uint8_t { production, toy };

/// Which keyed function family to instantiate. Both variants are the same
/// construction; the toy one is truncated far enough that one-wayness and
/// second-preimage resistance can be brute-forced.
struct FamilySpec {
  FamilyVariant variant = FamilyVariant::production;
  std::uint32_t n_bits = 0;

  static FamilySpec production(std::uint32_t n_bits) {
    if (n_bits != 128 && n_bits != 192 && n_bits != 256) {
      throw InvalidParameter("production variant requires n in {128, 192, 256}");
    }
    return {FamilyVariant::production, n_bits};
  }

  static FamilySpec toy(std::uint32_t n_bits) {
    if (n_bits < 8 || n_bits > kToyMaxBits) {
      throw InvalidParameter("toy variant requires 8 <= n <= 20");
    }
    return {FamilyVariant::toy, n_bits};
  }

  static FamilySpec for_bits(std::uint32_t n_bits) {
    return n_bits <= kToyMaxBits ? toy(n_bits) : production(n_bits);
  }

  bool operator==(const FamilySpec&) const = default;
};

/// A member f_k of the function family.
struct FamilyKey {
  FamilySpec spec;
  std::array<std::uint8_t, kFamilyKeyBytes> bytes{};

  bool operator==(const FamilyKey&) const = default;
};

/// Per-level XOR masks r_1..r_{w-1}. Index j (0-based) holds r_{j+1}, the
/// mask applied when stepping out of level j.
struct BitmaskVector {
  std::vector<BitString> masks;

  std::size_t size() const noexcept { return masks.size(); }
  std::span<const BitString> span() const noexcept { return masks; }
};

inline FamilyKey sample_key(const FamilySpec& spec, Rng& rng) {
  FamilyKey key{spec, {}};
  rng.fill(key.bytes);
  return key;
}

inline BitmaskVector sample_masks(const FamilySpec& spec, std::uint32_t w, Rng& rng) {
  BitmaskVector r;
  r.masks.reserve(w - 1);
  for (std::uint32_t i = 0; i + 1 < w; ++i) r.masks.push_back(random_bits(rng, spec.n_bits));
  return r;
}

/// f_k evaluation count, accumulated explicitly by callers; runtime in the
/// security analysis is measured in these units.
struct EvalCounter {
  std::uint64_t count = 0;

  void add(std::uint64_t n) noexcept { count += n; }
};

inline void add_evals(EvalCounter* counter, std::uint64_t n) {
  if (counter != nullptr) counter->add(n);
}

/// f_k: {0,1}^n -> {0,1}^n.
inline BitString evaluate(const FamilyKey& key, const BitString& x) {
  if (x.bits() != key.spec.n_bits) throw InvalidLength("evaluate: input is not n bits");

  std::array<std::uint8_t, 1 + kFamilyKeyBytes + 32> input{};
  input[0] = kFamilyDomainTag;
  std::memcpy(input.data() + 1, key.bytes.data(), kFamilyKeyBytes);
  std::memcpy(input.data() + 1 + kFamilyKeyBytes, x.data(), x.size_bytes());
  const auto digest =
      detail::sha256({input.data(), 1 + kFamilyKeyBytes + x.size_bytes()});

  BitString out(key.spec.n_bits);
  std::memcpy(out.data(), digest.data(), out.size_bytes());
  out.mask_padding();
  return out;
}

/// Chaining function: `steps`-fold application of f_k starting from a node
/// at level `start_level`, XORing the level mask before each application.
///
/// Level bookkeeping: the step out of level v uses mask r_{v+1}, which in
/// the 0-based mask vector is masks[v]. A node at level v chained s steps
/// lands at level v+s and consumes masks[start_level .. start_level+s-1].
/// Zero steps return x unchanged.
inline BitString chain(const FamilyKey& key, BitString x, std::span<const BitString> masks,
                       std::uint32_t start_level, std::uint32_t steps,
                       EvalCounter* evals = nullptr) {
  if (std::size_t{start_level} + steps > masks.size()) {
    throw MaskRangeError("chain: mask vector too short for requested levels");
  }
  for (std::uint32_t s = 0; s < steps; ++s) {
    x ^= masks[start_level + s];
    x = evaluate(key, x);
  }
  add_evals(evals, steps);
  return x;
}

inline BitString chain(const FamilyKey& key, BitString x, const BitmaskVector& masks,
                       std::uint32_t start_level, std::uint32_t steps,
                       EvalCounter* evals = nullptr) {
  return chain(key, std::move(x), masks.span(), start_level, steps, evals);
}

}  // namespace wotsplus
