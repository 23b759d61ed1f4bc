#pragma once

#include <mutex>
#include <utility>
#include <vector>

#include "wotsplus/hash_family.hpp"
#include "wotsplus/params.hpp"
#include "wotsplus/rng.hpp"

namespace wotsplus {

/// One-time secret key: l independent n-bit chain starts, plus everything
/// needed to run the chains. `used` flips to true on the first sign and
/// never back.
struct SecretKey {
  Params params;
  FamilyKey key;
  BitmaskVector masks;
  std::vector<BitString> chains;
  bool used = false;
};

/// pk_0 = (masks, key), pk_1..pk_l = chain ends at level w-1.
struct PublicKey {
  Params params;
  FamilyKey key;
  BitmaskVector masks;
  std::vector<BitString> chains;
};

struct Signature {
  Params params;
  std::vector<BitString> nodes;
};

struct KeyPair {
  SecretKey sk;
  PublicKey pk;
};

/// Key generation with caller-fixed family key and masks; secret chains are
/// sampled from `rng`. The reduction machinery builds keys around supplied
/// challenges this way.
inline KeyPair keygen_with(const Params& params, const FamilyKey& key,
                           BitmaskVector masks, Rng& rng, EvalCounter* evals = nullptr) {
  if (key.spec.n_bits != params.n) throw InvalidParameter("family width != params.n");
  if (masks.size() != params.w - 1) throw InvalidParameter("mask vector must have w-1 entries");

  KeyPair kp;
  kp.sk.params = params;
  kp.sk.key = key;
  kp.sk.masks = std::move(masks);
  kp.sk.chains.reserve(params.l);
  for (std::uint32_t i = 0; i < params.l; ++i) {
    kp.sk.chains.push_back(random_bits(rng, params.n));
  }

  kp.pk.params = params;
  kp.pk.key = key;
  kp.pk.masks = kp.sk.masks;
  kp.pk.chains.reserve(params.l);
  for (std::uint32_t i = 0; i < params.l; ++i) {
    kp.pk.chains.push_back(chain(key, kp.sk.chains[i], kp.sk.masks, 0, params.w - 1, evals));
  }
  return kp;
}

inline KeyPair keygen(const Params& params, const FamilySpec& spec, Rng& rng,
                      EvalCounter* evals = nullptr) {
  return keygen_with(params, sample_key(spec, rng), sample_masks(spec, params.w, rng), rng,
                     evals);
}

/// sigma_i = chain node of sk_i at level b_i. One-time: throws KeyAlreadyUsed
/// on the second call; the check-and-set is atomic within the process.
inline Signature sign(SecretKey& sk, const BitString& message, EvalCounter* evals = nullptr) {
  {
    static std::mutex used_mutex;
    std::lock_guard<std::mutex> lock(used_mutex);
    if (sk.used) throw KeyAlreadyUsed("one-time key has already signed");
    sk.used = true;
  }
  const BaseWDigits b = encode(message, sk.params);

  Signature sig;
  sig.params = sk.params;
  sig.nodes.reserve(sk.params.l);
  for (std::uint32_t i = 0; i < sk.params.l; ++i) {
    sig.nodes.push_back(chain(sk.key, sk.chains[i], sk.masks, 0, b.digits[i], evals));
  }
  return sig;
}

/// Accepts iff every signature node chains up to its public chain end.
/// Structurally malformed inputs reject rather than throw: to a caller a
/// bad encoding and a forgery are the same thing.
inline bool verify(const PublicKey& pk, const Signature& sig, const BitString& message,
                   EvalCounter* evals = nullptr) {
  if (sig.params != pk.params) return false;
  if (message.bits() != pk.params.m) return false;
  if (sig.nodes.size() != pk.params.l || pk.chains.size() != pk.params.l) return false;
  if (pk.masks.size() != pk.params.w - 1) return false;
  for (const BitString& node : sig.nodes) {
    if (node.bits() != pk.params.n) return false;
  }

  const BaseWDigits b = encode(message, pk.params);
  bool ok = true;
  for (std::uint32_t i = 0; i < pk.params.l; ++i) {
    const std::uint32_t digit = b.digits[i];
    const BitString top =
        chain(pk.key, sig.nodes[i], pk.masks, digit, pk.params.w - 1 - digit, evals);
    if (top != pk.chains[i]) ok = false;
  }
  return ok;
}

}  // namespace wotsplus
