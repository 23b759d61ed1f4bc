#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include "wotsplus/brute_force.hpp"
#include "wotsplus/reduction.hpp"

namespace wotsplus {

/// All x at `level` whose chain walk reaches `target` at level w-1. Scans
/// the whole toy domain; the honest chain node always qualifies, so the
/// result is never empty for a genuine public chain end.
inline std::vector<BitString> invert_chain_segment(const FamilyKey& key,
                                                   const BitmaskVector& masks,
                                                   std::uint32_t level, const BitString& target,
                                                   const Params& params,
                                                   EvalCounter& evals) {
  if (key.spec.n_bits > kToyMaxBits) {
    throw DomainTooLarge("chain inversion limited to toy n <= 20");
  }
  std::vector<BitString> found;
  const std::uint64_t domain = std::uint64_t{1} << key.spec.n_bits;
  for (std::uint64_t v = 0; v < domain; ++v) {
    BitString x = BitString::from_uint(v, key.spec.n_bits);
    if (chain(key, x, masks, level, params.w - 1 - level, &evals) == target) {
      found.push_back(std::move(x));
    }
  }
  return found;
}

/// Never queries, never forges.
class GiveUpAdversary final : public Adversary {
 public:
  std::string_view name() const override { return "give-up"; }

  std::optional<Forgery> run(AdversaryContext& ctx) const override {
    (void)ctx;
    return std::nullopt;
  }
};

/// Queries a uniform message and hands the answer straight back. The
/// experiment must reject it (the forged message equals the queried one).
class ReplayAdversary final : public Adversary {
 public:
  std::string_view name() const override { return "replay"; }

  std::optional<Forgery> run(AdversaryContext& ctx) const override {
    const BitString message = random_bits(ctx.rng, ctx.pk.params.m);
    auto sig = ctx.sign_oracle(message);
    if (!sig) return std::nullopt;
    return Forgery{message, std::move(*sig)};
  }
};

/// Forges by brute force at toy width: asks for one signature, picks a fresh
/// uniform target message, walks chains forward where its digits grew and
/// inverts chain segments by exhaustive search where they shrank. The
/// inversion may land on an impostor node whose chain merges with the
/// honest one higher up, which is what feeds the second-preimage path of
/// the extractor.
class BruteForceForger final : public Adversary {
 public:
  enum class Pick : std::uint8_t {
    first,   // lowest qualifying node
    random,  // uniform qualifying node; spreads merge levels ("collision-seeker")
  };

  explicit BruteForceForger(Pick pick = Pick::first) : pick_(pick) {}

  std::string_view name() const override {
    return pick_ == Pick::first ? "brute-force" : "collision-seeker";
  }

  std::optional<Forgery> run(AdversaryContext& ctx) const override {
    const Params& p = ctx.pk.params;
    const BitString message = random_bits(ctx.rng, p.m);
    auto sig = ctx.sign_oracle(message);
    if (!sig) return std::nullopt;

    BitString target = random_bits(ctx.rng, p.m);
    while (target == message) target = random_bits(ctx.rng, p.m);

    const BaseWDigits b = encode(message, p);
    const BaseWDigits b_target = encode(target, p);

    Signature forged;
    forged.params = p;
    forged.nodes.reserve(p.l);
    for (std::uint32_t i = 0; i < p.l; ++i) {
      if (b_target.digits[i] >= b.digits[i]) {
        forged.nodes.push_back(chain(ctx.pk.key, sig->nodes[i], ctx.pk.masks, b.digits[i],
                                     b_target.digits[i] - b.digits[i], &ctx.evals));
        continue;
      }
      auto candidates = invert_chain_segment(ctx.pk.key, ctx.pk.masks, b_target.digits[i],
                                             ctx.pk.chains[i], p, ctx.evals);
      if (candidates.empty()) return std::nullopt;
      const std::size_t at = pick_ == Pick::first
                                 ? 0
                                 : static_cast<std::size_t>(
                                       uniform_below(ctx.rng, candidates.size()));
      forged.nodes.push_back(std::move(candidates[at]));
    }
    return Forgery{std::move(target), std::move(forged)};
  }

 private:
  Pick pick_;
};

/// Only walks chains forward: looks for a second message whose digits all
/// sit at or above the signed ones. The checksum makes that impossible, so
/// this adversary demonstrably never forges; the search is exhaustive over
/// the toy message space to prove it is not for lack of trying.
class DigitWalkerAdversary final : public Adversary {
 public:
  std::string_view name() const override { return "digit-walker"; }

  std::optional<Forgery> run(AdversaryContext& ctx) const override {
    const Params& p = ctx.pk.params;
    if (p.m > kToyMaxBits) throw DomainTooLarge("digit-walker enumerates 2^m messages");

    const BitString message = random_bits(ctx.rng, p.m);
    auto sig = ctx.sign_oracle(message);
    if (!sig) return std::nullopt;

    const BaseWDigits b = encode(message, p);
    const std::uint64_t space = std::uint64_t{1} << p.m;
    for (std::uint64_t v = 0; v < space; ++v) {
      const BitString target = BitString::from_uint(v, p.m);
      if (target == message) continue;
      const BaseWDigits b_target = encode(target, p);
      bool walkable = true;
      for (std::uint32_t i = 0; i < p.l && walkable; ++i) {
        walkable = b_target.digits[i] >= b.digits[i];
      }
      if (!walkable) continue;

      Signature forged;
      forged.params = p;
      forged.nodes.reserve(p.l);
      for (std::uint32_t i = 0; i < p.l; ++i) {
        forged.nodes.push_back(chain(ctx.pk.key, sig->nodes[i], ctx.pk.masks, b.digits[i],
                                     b_target.digits[i] - b.digits[i], &ctx.evals));
      }
      return Forgery{target, std::move(forged)};
    }
    return std::nullopt;
  }
};

/// Models a perfect undetectability breaker: given the leaked challenge
/// chain it always queries a message whose digit there is zero, so the
/// query digit never reaches the planted level. Without the leak it falls
/// back to the all-zero message (every digit it can keep low, low). It
/// never attempts a forgery; its purpose is starving the extractor of
/// answerable queries.
class NastyAdversary final : public Adversary {
 public:
  std::string_view name() const override { return "nasty"; }

  std::optional<Forgery> run(AdversaryContext& ctx) const override {
    const Params& p = ctx.pk.params;
    BitString message(p.m);  // all-zero: message digits 0
    if (ctx.leaked_alpha && *ctx.leaked_alpha >= p.l1) {
      // Checksum chain: the all-ones message has checksum 0, so every
      // checksum digit is 0.
      for (std::uint32_t i = 0; i < p.m; ++i) message.flip_bit(i);
    }
    ctx.sign_oracle(message);
    return std::nullopt;
  }
};

inline std::unique_ptr<Adversary> make_adversary(std::string_view name) {
  if (name == "give-up") return std::make_unique<GiveUpAdversary>();
  if (name == "replay") return std::make_unique<ReplayAdversary>();
  if (name == "brute-force") return std::make_unique<BruteForceForger>();
  if (name == "collision-seeker") {
    return std::make_unique<BruteForceForger>(BruteForceForger::Pick::random);
  }
  if (name == "digit-walker") return std::make_unique<DigitWalkerAdversary>();
  if (name == "nasty") return std::make_unique<NastyAdversary>();
  throw InvalidParameter("unknown adversary: " + std::string(name));
}

inline const std::vector<std::string_view>& adversary_names() {
  static const std::vector<std::string_view> names = {
      "give-up", "replay", "brute-force", "collision-seeker", "digit-walker", "nasty"};
  return names;
}

}  // namespace wotsplus
