#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "wotsplus/hash_family.hpp"
#include "wotsplus/params.hpp"
#include "wotsplus/rng.hpp"
#include "wotsplus/wots.hpp"

namespace wotsplus {

// ---------------------------------------------------------------------------
// Challenge placement
// ---------------------------------------------------------------------------

/// Where the one-wayness and second-preimage challenges sit inside the
/// doctored key.
///
/// Chain `alpha` (0-based) carries both: the OW target y_c is planted as the
/// chain node at level `beta` (1 <= beta <= w-1), and when beta < w-1 the
/// mask for level `gamma` (beta < gamma <= w-1) is rewritten so the chain's
/// level-gamma node equals f_k(x_c). When beta == w-1 there is no room above
/// the OW target and gamma is absent.
struct ChallengeSpec {
  std::uint32_t alpha = 0;
  std::uint32_t beta = 0;
  std::optional<std::uint32_t> gamma;
  BitString y_c;
  BitString x_c;
};

enum class FailReason : std::uint8_t {
  none,
  bad_query,            // query digit in chain alpha fell below beta
  no_forgery,           // adversary gave up, replayed, or forged invalidly
  wrong_position,       // forgery digit in chain alpha at or above beta
  collision_elsewhere,  // chains merged at a level other than gamma
};

inline std::string_view to_string(FailReason r) {
  switch (r) {
    case FailReason::bad_query: return "bad-query";
    case FailReason::no_forgery: return "no-forgery";
    case FailReason::wrong_position: return "wrong-position";
    case FailReason::collision_elsewhere: return "collision-elsewhere";
    default: return "none";
  }
}

struct ReductionOutcome {
  enum class Kind : std::uint8_t { preimage, second_preimage, fail };

  Kind kind = Kind::fail;
  FailReason reason = FailReason::none;
  BitString solution;  // preimage of y_c, or second preimage of x_c

  // Evaluation accounting. `evaluations_used` is the whole run including the
  // adversary's own work; the reduction overhead alone must stay within
  // 3lw + w - 2.
  std::uint64_t evaluations_used = 0;
  std::uint64_t adversary_evaluations = 0;
  bool budget_ok = true;

  // Per-trial event flags for the statistics layer.
  std::uint32_t beta = 0;
  std::optional<std::uint32_t> gamma;
  bool made_query = false;
  std::optional<std::uint32_t> query_digit_alpha;    // b_alpha
  std::optional<std::uint32_t> forgery_digit_alpha;  // b'_alpha
  bool query_hit_beta = false;                       // b_alpha == beta
  bool forgery_valid = false;
  bool fortunate_below_beta = false;   // query ok, valid, b'_alpha < beta
  bool fortunate_below_query = false;  // query ok, valid, b'_alpha < b_alpha
};

// ---------------------------------------------------------------------------
// Adversary contract
// ---------------------------------------------------------------------------

/// A forging adversary. It sees the public key and may call the signing
/// oracle at most once; it never sees the secret key or the challenge
/// placement. `leaked_alpha` is populated only by the challenge-leak
/// demonstration mode (modelling an adversary that breaks undetectability
/// and locates the doctored chain).
struct AdversaryContext {
  const PublicKey& pk;
  const std::function<std::optional<Signature>(const BitString& message)>& sign_oracle;
  Rng& rng;
  EvalCounter& evals;
  std::optional<std::uint32_t> leaked_alpha;
};

struct Forgery {
  BitString message;
  Signature sig;
};

class Adversary {
 public:
  virtual ~Adversary() = default;
  virtual std::string_view name() const = 0;
  virtual std::optional<Forgery> run(AdversaryContext& ctx) const = 0;
};

// ---------------------------------------------------------------------------
// Challenge planting
// ---------------------------------------------------------------------------

struct PlantResult {
  ChallengeSpec challenge;
  SecretKey sk;  // masks field holds the planted vector r'
  PublicKey pk;  // what the adversary sees
};

/// Builds a key pair around the challenges:
///   - chain alpha's public end is the level-(w-1) node of the chain that
///     starts with y_c at level beta;
///   - when beta < w-1, mask gamma becomes (planted node at gamma-1) xor x_c,
///     so the planted chain's step into gamma evaluates f_k on x_c;
///   - every other chain is generated honestly under the planted masks.
///
/// The secret chains are sampled as usual and chain alpha's secret entry is
/// genuine but disconnected from pk'_alpha; answering a query never touches
/// it.
inline PlantResult plant_challenges(const Params& params, const FamilyKey& key,
                                    const BitString& y_c, const BitString& x_c, Rng& rng,
                                    EvalCounter* evals = nullptr) {
  if (key.spec.n_bits != params.n) throw InvalidParameter("family width != params.n");
  if (y_c.bits() != params.n || x_c.bits() != params.n) {
    throw InvalidLength("challenges must be n bits");
  }

  ChallengeSpec ch;
  ch.alpha = static_cast<std::uint32_t>(uniform_below(rng, params.l));
  ch.beta = 1 + static_cast<std::uint32_t>(uniform_below(rng, params.w - 1));
  ch.y_c = y_c;
  ch.x_c = x_c;

  BitmaskVector masks = sample_masks(key.spec, params.w, rng);
  if (ch.beta < params.w - 1) {
    const std::uint32_t gamma =
        ch.beta + 1 +
        static_cast<std::uint32_t>(uniform_below(rng, params.w - 1 - ch.beta));
    ch.gamma = gamma;
    // Node of the planted chain at level gamma-1 (masks below gamma are
    // untouched, so pre-plant masks give the same walk).
    const BitString node = chain(key, y_c, masks, ch.beta, gamma - 1 - ch.beta, evals);
    masks.masks[gamma - 1] = node ^ x_c;
  }

  PlantResult out;
  out.challenge = std::move(ch);

  out.sk.params = params;
  out.sk.key = key;
  out.sk.masks = std::move(masks);
  out.sk.chains.reserve(params.l);
  for (std::uint32_t i = 0; i < params.l; ++i) {
    out.sk.chains.push_back(random_bits(rng, params.n));
  }

  out.pk.params = params;
  out.pk.key = key;
  out.pk.masks = out.sk.masks;
  out.pk.chains.reserve(params.l);
  for (std::uint32_t i = 0; i < params.l; ++i) {
    if (i == out.challenge.alpha) {
      out.pk.chains.push_back(chain(key, y_c, out.sk.masks, out.challenge.beta,
                                    params.w - 1 - out.challenge.beta, evals));
    } else {
      out.pk.chains.push_back(chain(key, out.sk.chains[i], out.sk.masks, 0, params.w - 1, evals));
    }
  }
  return out;
}

/// Signs a query against the planted key. The honest signature covers every
/// chain except alpha, whose node must start from y_c; a query whose alpha
/// digit lies below beta cannot be answered and returns nullopt.
inline std::optional<Signature> answer_query(const ChallengeSpec& ch, SecretKey& sk,
                                             const BitString& message,
                                             EvalCounter* evals = nullptr) {
  const BaseWDigits b = encode(message, sk.params);
  if (b.digits[ch.alpha] < ch.beta) return std::nullopt;

  Signature sig = sign(sk, message, evals);
  sig.nodes[ch.alpha] =
      chain(sk.key, ch.y_c, sk.masks, ch.beta, b.digits[ch.alpha] - ch.beta, evals);
  return sig;
}

// ---------------------------------------------------------------------------
// Extraction
// ---------------------------------------------------------------------------

/// Turns a valid forgery (already verified against the planted key, message
/// distinct from the query) into a challenge solution.
///
/// With d = b'_alpha < beta, walk chain alpha upward from sigma'_alpha and
/// compare against the planted chain:
///   - the walk reaches y_c at level beta (always the case when beta = w-1,
///     since validity pins the level-(w-1) node to pk'_alpha = y_c): the
///     walk's level-(beta-1) node, masked for the step into beta, is an f_k
///     preimage of y_c;
///   - otherwise the two chains differ at beta yet share the end node, so
///     they merge somewhere in (beta, w-1]. If that happens exactly at gamma
///     with distinct level-(gamma-1) nodes, the walk's masked level-(gamma-1)
///     node collides with x_c under f_k: a second preimage. A merge anywhere
///     else is unusable.
///
/// Every claimed solution is re-verified against f_k before being returned;
/// failure of that check throws InternalInconsistency.
inline ReductionOutcome extract(const ChallengeSpec& ch, const FamilyKey& key,
                                const BitmaskVector& masks, const Params& params,
                                const Forgery& forgery, EvalCounter* evals = nullptr) {
  ReductionOutcome out;
  out.beta = ch.beta;
  out.gamma = ch.gamma;

  const BaseWDigits b_forged = encode(forgery.message, params);
  const std::uint32_t d = b_forged.digits[ch.alpha];
  out.forgery_digit_alpha = d;

  if (d >= ch.beta) {
    out.kind = ReductionOutcome::Kind::fail;
    out.reason = FailReason::wrong_position;
    return out;
  }

  // One upward walk of chain alpha, keeping the nodes we may need. Walk to
  // gamma when planted, else to beta.
  const std::uint32_t top = ch.gamma ? *ch.gamma : ch.beta;
  std::vector<BitString> node(top + 1);
  node[d] = forgery.sig.nodes[ch.alpha];
  for (std::uint32_t level = d + 1; level <= top; ++level) {
    node[level] = chain(key, node[level - 1], masks, level - 1, 1, evals);
  }

  if (ch.beta == params.w - 1 || node[ch.beta] == ch.y_c) {
    BitString preimage = node[ch.beta - 1] ^ masks.masks[ch.beta - 1];
    if (evaluate(key, preimage) != ch.y_c) {
      add_evals(evals, 1);
      throw InternalInconsistency("claimed preimage does not map to y_c");
    }
    add_evals(evals, 1);
    out.kind = ReductionOutcome::Kind::preimage;
    out.solution = std::move(preimage);
    return out;
  }

  const std::uint32_t gamma = *ch.gamma;
  // Planted chain node at gamma, computed the honest way (walk from y_c
  // through the planted mask).
  const BitString planted_at_gamma =
      chain(key, ch.y_c, masks, ch.beta, gamma - ch.beta, evals);
  BitString candidate = node[gamma - 1] ^ masks.masks[gamma - 1];
  if (node[gamma] == planted_at_gamma && candidate != ch.x_c) {
    add_evals(evals, 2);
    if (evaluate(key, candidate) != evaluate(key, ch.x_c)) {
      throw InternalInconsistency("claimed second preimage does not collide with x_c");
    }
    out.kind = ReductionOutcome::Kind::second_preimage;
    out.solution = std::move(candidate);
    return out;
  }

  out.kind = ReductionOutcome::Kind::fail;
  out.reason = FailReason::collision_elsewhere;
  return out;
}

// ---------------------------------------------------------------------------
// The extracting oracle machine
// ---------------------------------------------------------------------------

/// Wraps the adversary: plants challenges in a fresh key pair, relays one
/// signing query, and converts a valid forgery into a preimage of y_c or a
/// second preimage of x_c. `leak_alpha` switches on the challenge-position
/// side channel for the detection demonstration.
inline ReductionOutcome run_extractor(const Adversary& adversary, const Params& params,
                                      const FamilyKey& key, const BitString& y_c,
                                      const BitString& x_c, Rng& rng, bool leak_alpha = false) {
  EvalCounter reduction_evals;
  EvalCounter adversary_evals;

  PlantResult plant = plant_challenges(params, key, y_c, x_c, rng, &reduction_evals);

  ReductionOutcome out;
  out.beta = plant.challenge.beta;
  out.gamma = plant.challenge.gamma;

  bool bad_query = false;
  std::optional<BitString> queried_message;
  auto oracle = [&](const BitString& message) -> std::optional<Signature> {
    if (queried_message) throw Error("adversary exceeded the one-query limit");
    queried_message = message;
    out.made_query = true;
    const std::uint32_t digit = encode(message, params).digits[plant.challenge.alpha];
    out.query_digit_alpha = digit;
    out.query_hit_beta = digit == plant.challenge.beta;
    auto sig = answer_query(plant.challenge, plant.sk, message, &reduction_evals);
    bad_query = !sig.has_value();
    return sig;
  };

  std::function<std::optional<Signature>(const BitString&)> oracle_fn = oracle;
  AdversaryContext ctx{plant.pk, oracle_fn, rng, adversary_evals,
                       leak_alpha ? std::optional<std::uint32_t>(plant.challenge.alpha)
                                  : std::nullopt};
  std::optional<Forgery> forgery = adversary.run(ctx);

  auto finish = [&](ReductionOutcome result) {
    result.beta = plant.challenge.beta;
    result.gamma = plant.challenge.gamma;
    result.made_query = out.made_query;
    result.query_digit_alpha = out.query_digit_alpha;
    result.query_hit_beta = out.query_hit_beta;
    result.adversary_evaluations = adversary_evals.count;
    result.evaluations_used = reduction_evals.count + adversary_evals.count;
    const std::uint64_t overhead = 3ull * params.l * params.w + params.w - 2;
    result.budget_ok = reduction_evals.count <= overhead;
    return result;
  };

  if (bad_query) {
    out.kind = ReductionOutcome::Kind::fail;
    out.reason = FailReason::bad_query;
    return finish(out);
  }

  if (!forgery) {
    out.kind = ReductionOutcome::Kind::fail;
    out.reason = FailReason::no_forgery;
    return finish(out);
  }

  const bool fresh_message = !queried_message || forgery->message != *queried_message;
  const bool valid = fresh_message &&
                     verify(plant.pk, forgery->sig, forgery->message, &reduction_evals);
  if (!valid) {
    out.kind = ReductionOutcome::Kind::fail;
    out.reason = FailReason::no_forgery;
    return finish(out);
  }

  ReductionOutcome extracted =
      extract(plant.challenge, key, plant.sk.masks, params, *forgery, &reduction_evals);
  extracted.forgery_valid = true;
  if (extracted.forgery_digit_alpha) {
    const std::uint32_t d = *extracted.forgery_digit_alpha;
    extracted.fortunate_below_beta = d < plant.challenge.beta;
    extracted.fortunate_below_query =
        out.query_digit_alpha.has_value() && d < *out.query_digit_alpha;
  }
  return finish(extracted);
}

// ---------------------------------------------------------------------------
// The fortunate-event probe and the undetectability distinguisher
// ---------------------------------------------------------------------------

/// Input to the probe machine: a chain-top sample. `u` is planted as the
/// level-`beta` node of one chain; the two samplers below realise the two
/// distributions whose distinguishability the analysis bounds.
struct ProbeSample {
  std::uint32_t beta = 0;
  BitString u;
  BitmaskVector masks;
  FamilyKey key;
};

/// u uniform: the planted-key distribution the extractor produces.
inline ProbeSample sample_probe_uniform(const Params& params, const FamilySpec& spec,
                                        Rng& rng) {
  ProbeSample s;
  s.beta = 1 + static_cast<std::uint32_t>(uniform_below(rng, params.w - 1));
  s.key = sample_key(spec, rng);
  s.masks = sample_masks(spec, params.w, rng);
  s.u = random_bits(rng, params.n);
  return s;
}

/// u = chain node at level beta grown from a uniform start: exactly how a
/// fair key generation populates a chain, so the probe sees an honestly
/// distributed public key.
inline ProbeSample sample_probe_chained(const Params& params, const FamilySpec& spec, Rng& rng,
                                        EvalCounter* evals = nullptr) {
  ProbeSample s;
  s.beta = 1 + static_cast<std::uint32_t>(uniform_below(rng, params.w - 1));
  s.key = sample_key(spec, rng);
  s.masks = sample_masks(spec, params.w, rng);
  s.u = chain(s.key, random_bits(rng, params.n), s.masks, 0, s.beta, evals);
  return s;
}

/// Hybrid sample H_i for a fixed beta*: u is a uniform start planted at
/// level i and chained up to beta*. H_0 is the fair distribution,
/// H_{beta*} the uniform one.
inline ProbeSample sample_probe_hybrid(const Params& params, const FamilySpec& spec,
                                       std::uint32_t beta_star, std::uint32_t i, Rng& rng,
                                       EvalCounter* evals = nullptr) {
  if (beta_star < 1 || beta_star > params.w - 1 || i > beta_star) {
    throw IndexRange("hybrid index requires 0 <= i <= beta* <= w-1");
  }
  ProbeSample s;
  s.beta = beta_star;
  s.key = sample_key(spec, rng);
  s.masks = sample_masks(spec, params.w, rng);
  s.u = chain(s.key, random_bits(rng, params.n), s.masks, i, beta_star - i, evals);
  return s;
}

struct ProbeResult {
  int output = 0;  // 1 iff the fortunate event happened
  std::uint32_t alpha = 0;
  std::uint32_t beta = 0;
  bool made_query = false;
  std::optional<std::uint32_t> query_digit_alpha;
  std::optional<std::uint32_t> forgery_digit_alpha;
  bool forgery_valid = false;
  std::uint64_t evaluations_used = 0;
  std::uint64_t adversary_evaluations = 0;
  bool budget_ok = true;
};

/// Runs the adversary against a key whose alpha-chain top grows out of the
/// sample value, and reports whether the fortunate event occurred: the
/// query digit reached beta, the forgery was valid, and the forgery digit
/// fell below beta. Against chained samples the adversary faces an exactly
/// fair key, so the mean output estimates the fair fortunate rate; against
/// uniform samples it estimates the planted one.
inline ProbeResult run_fortunate_probe(const Adversary& adversary, const Params& params,
                                       const ProbeSample& sample, Rng& rng,
                                       bool leak_alpha = false) {
  if (sample.beta < 1 || sample.beta > params.w - 1) throw IndexRange("beta out of range");
  if (sample.u.bits() != params.n) throw InvalidLength("sample value must be n bits");

  EvalCounter reduction_evals;
  EvalCounter adversary_evals;

  ProbeResult out;
  out.beta = sample.beta;

  KeyPair kp = keygen_with(params, sample.key, sample.masks, rng, &reduction_evals);
  const std::uint32_t alpha = static_cast<std::uint32_t>(uniform_below(rng, params.l));
  out.alpha = alpha;
  kp.pk.chains[alpha] = chain(sample.key, sample.u, kp.pk.masks, sample.beta,
                              params.w - 1 - sample.beta, &reduction_evals);

  ChallengeSpec ch;
  ch.alpha = alpha;
  ch.beta = sample.beta;
  ch.y_c = sample.u;

  bool bad_query = false;
  std::optional<BitString> queried_message;
  auto oracle = [&](const BitString& message) -> std::optional<Signature> {
    if (queried_message) throw Error("adversary exceeded the one-query limit");
    queried_message = message;
    out.made_query = true;
    out.query_digit_alpha = encode(message, params).digits[alpha];
    auto sig = answer_query(ch, kp.sk, message, &reduction_evals);
    bad_query = !sig.has_value();
    return sig;
  };

  std::function<std::optional<Signature>(const BitString&)> oracle_fn = oracle;
  AdversaryContext ctx{kp.pk, oracle_fn, rng, adversary_evals,
                       leak_alpha ? std::optional<std::uint32_t>(alpha) : std::nullopt};
  std::optional<Forgery> forgery = adversary.run(ctx);

  out.adversary_evaluations = adversary_evals.count;
  const std::uint64_t overhead = 3ull * params.l * params.w + params.w - 2;

  if (!bad_query && forgery) {
    const bool fresh = !queried_message || forgery->message != *queried_message;
    if (fresh && verify(kp.pk, forgery->sig, forgery->message, &reduction_evals)) {
      out.forgery_valid = true;
      const std::uint32_t d = encode(forgery->message, params).digits[alpha];
      out.forgery_digit_alpha = d;
      if (d < sample.beta) out.output = 1;
    }
  }

  out.evaluations_used = reduction_evals.count + adversary_evals.count;
  out.budget_ok = reduction_evals.count <= overhead;
  return out;
}

/// Undetectability sample: a value that is either uniform or the image of a
/// uniform point under f_k.
struct UdSample {
  BitString u;
  FamilyKey key;
};

inline UdSample sample_ud_uniform(const FamilySpec& spec, Rng& rng) {
  UdSample s;
  s.key = sample_key(spec, rng);
  s.u = random_bits(rng, spec.n_bits);
  return s;
}

inline UdSample sample_ud_image(const FamilySpec& spec, Rng& rng,
                                EvalCounter* evals = nullptr) {
  UdSample s;
  s.key = sample_key(spec, rng);
  s.u = evaluate(s.key, random_bits(rng, spec.n_bits));
  add_evals(evals, 1);
  return s;
}

struct DistinguisherResult {
  ProbeResult probe;
  std::uint64_t embed_evaluations = 0;
};

/// Distinguisher built from the probe: embeds the sample value at level
/// i*+1, chains it up to beta* under fresh masks, and forwards the result.
/// A uniform u lands the probe on hybrid H_{i*+1}; an f_k image lands it on
/// H_{i*}, because chaining an image from level i*+1 equals chaining its
/// masked preimage from level i*. The probe's output difference across the
/// two input distributions is therefore the adjacent-hybrid advantage.
inline DistinguisherResult run_ud_distinguisher(const Adversary& adversary,
                                                const Params& params, const UdSample& sample,
                                                std::uint32_t beta_star, std::uint32_t i_star,
                                                Rng& rng, bool leak_alpha = false) {
  if (beta_star < 1 || beta_star > params.w - 1 || i_star >= beta_star) {
    throw IndexRange("distinguisher requires 0 <= i* < beta* <= w-1");
  }
  if (sample.u.bits() != params.n) throw InvalidLength("sample value must be n bits");

  EvalCounter embed_evals;
  ProbeSample probe;
  probe.beta = beta_star;
  probe.key = sample.key;
  probe.masks = sample_masks(sample.key.spec, params.w, rng);
  probe.u = chain(sample.key, sample.u, probe.masks, i_star + 1, beta_star - i_star - 1,
                  &embed_evals);

  DistinguisherResult out;
  out.embed_evaluations = embed_evals.count;
  out.probe = run_fortunate_probe(adversary, params, probe, rng, leak_alpha);
  out.probe.evaluations_used += embed_evals.count;
  return out;
}

}  // namespace wotsplus
