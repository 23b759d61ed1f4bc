#include <catch_amalgamated.hpp>

#include <map>

#include "wotsplus/adversaries.hpp"
#include "wotsplus/brute_force.hpp"
#include "wotsplus/reduction.hpp"

using namespace wotsplus;

namespace {

const Params kToy = derive_params(8, 8, 4);
const FamilySpec kToySpec = FamilySpec::toy(8);

struct Challenge {
  FamilyKey key;
  BitString y_c;  // image of a uniform point, as in the one-wayness game
  BitString x_c;
};

Challenge make_challenge(Rng& rng, const FamilySpec& spec = kToySpec) {
  Challenge ch;
  ch.key = sample_key(spec, rng);
  ch.y_c = evaluate(ch.key, random_bits(rng, spec.n_bits));
  ch.x_c = random_bits(rng, spec.n_bits);
  return ch;
}

/// Message whose digit at `index` equals `value`, found by toy enumeration.
BitString message_with_digit(const Params& p, std::uint32_t index, std::uint32_t value) {
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << p.m); ++v) {
    const BitString candidate = BitString::from_uint(v, p.m);
    if (encode(candidate, p).digits[index] == value) return candidate;
  }
  FAIL("no message with requested digit");
  return BitString(p.m);
}

}  // namespace

TEST_CASE("planting places the challenges where extraction expects them") {
  SeededRng rng(51);
  int beta_top_seen = 0;
  int gamma_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const Challenge ch = make_challenge(rng);
    EvalCounter evals;
    const PlantResult plant =
        plant_challenges(kToy, ch.key, ch.y_c, ch.x_c, rng, &evals);
    const ChallengeSpec& spec = plant.challenge;

    REQUIRE(spec.alpha < kToy.l);
    REQUIRE(spec.beta >= 1);
    REQUIRE(spec.beta <= kToy.w - 1);

    // Planted chain end recomputed independently.
    CHECK(plant.pk.chains[spec.alpha] ==
          chain(ch.key, ch.y_c, plant.pk.masks, spec.beta, kToy.w - 1 - spec.beta));

    // Honest chains under the planted masks.
    for (std::uint32_t i = 0; i < kToy.l; ++i) {
      if (i == spec.alpha) continue;
      CHECK(plant.pk.chains[i] ==
            chain(ch.key, plant.sk.chains[i], plant.pk.masks, 0, kToy.w - 1));
    }

    if (spec.beta == kToy.w - 1) {
      ++beta_top_seen;
      CHECK_FALSE(spec.gamma.has_value());
      CHECK(plant.pk.chains[spec.alpha] == ch.y_c);
    } else {
      ++gamma_seen;
      REQUIRE(spec.gamma.has_value());
      const std::uint32_t gamma = *spec.gamma;
      CHECK(gamma > spec.beta);
      CHECK(gamma <= kToy.w - 1);
      // The planted mask routes the chain through x_c: the node at gamma is
      // exactly f_k(x_c).
      CHECK(chain(ch.key, ch.y_c, plant.pk.masks, spec.beta, gamma - spec.beta) ==
            evaluate(ch.key, ch.x_c));
    }

    // Planting overhead: l-1 honest chains plus at most w-2 steps for the
    // planted chain and at most w-3 for the mask rewrite.
    CHECK(evals.count <= std::uint64_t{kToy.l} * (kToy.w - 1) + kToy.w - 2);
  }
  CHECK(beta_top_seen > 0);
  CHECK(gamma_seen > 0);
}

TEST_CASE("query answering around the planted level") {
  SeededRng rng(52);

  SECTION("digit below beta is unanswerable") {
    for (int trial = 0; trial < 100; ++trial) {
      const Challenge ch = make_challenge(rng);
      PlantResult plant = plant_challenges(kToy, ch.key, ch.y_c, ch.x_c, rng);
      if (plant.challenge.beta == 0) continue;
      const BitString message =
          message_with_digit(kToy, plant.challenge.alpha, plant.challenge.beta - 1);
      CHECK_FALSE(answer_query(plant.challenge, plant.sk, message).has_value());
    }
  }

  SECTION("digit equal to beta signs with y_c itself") {
    int exercised = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const Challenge ch = make_challenge(rng);
      PlantResult plant = plant_challenges(kToy, ch.key, ch.y_c, ch.x_c, rng);
      const BitString message =
          message_with_digit(kToy, plant.challenge.alpha, plant.challenge.beta);
      auto sig = answer_query(plant.challenge, plant.sk, message);
      REQUIRE(sig.has_value());
      CHECK(sig->nodes[plant.challenge.alpha] == ch.y_c);
      ++exercised;
    }
    CHECK(exercised == 100);
  }

  SECTION("answered queries verify against the planted key") {
    int answered = 0;
    for (int trial = 0; trial < 200; ++trial) {
      const Challenge ch = make_challenge(rng);
      PlantResult plant = plant_challenges(kToy, ch.key, ch.y_c, ch.x_c, rng);
      const BitString message = random_bits(rng, kToy.m);
      auto sig = answer_query(plant.challenge, plant.sk, message);
      if (!sig) continue;
      ++answered;
      CHECK(verify(plant.pk, *sig, message));
    }
    CHECK(answered > 50);
  }
}

TEST_CASE("extractor solves a challenge against the brute-force forger") {
  SeededRng rng(53);
  const BruteForceForger forger;

  std::uint64_t preimages = 0;
  std::uint64_t second_preimages = 0;
  std::uint64_t top_level_fortunate = 0;
  const std::uint64_t overhead_budget = 3ull * kToy.l * kToy.w + kToy.w - 2;

  for (int trial = 0; trial < 3000; ++trial) {
    const Challenge ch = make_challenge(rng);
    const ReductionOutcome out = run_extractor(forger, kToy, ch.key, ch.y_c, ch.x_c, rng);

    // Budget, per trial, no exceptions.
    CHECK(out.budget_ok);
    CHECK(out.evaluations_used <= out.adversary_evaluations + overhead_budget);

    if (out.kind == ReductionOutcome::Kind::preimage) {
      ++preimages;
      CHECK(evaluate(ch.key, out.solution) == ch.y_c);  // test-side oracle
      CHECK(out.fortunate_below_beta);
    }
    if (out.kind == ReductionOutcome::Kind::second_preimage) {
      ++second_preimages;
      CHECK(out.solution != ch.x_c);
      CHECK(evaluate(ch.key, out.solution) == evaluate(ch.key, ch.x_c));
      CHECK(out.fortunate_below_beta);
      REQUIRE(out.gamma.has_value());
    }
    if (out.kind == ReductionOutcome::Kind::fail) {
      CHECK((out.reason == FailReason::bad_query || out.reason == FailReason::no_forgery ||
             out.reason == FailReason::wrong_position ||
             out.reason == FailReason::collision_elsewhere));
    }

    // A fortunate forgery when beta sits at the top of the chain always
    // extracts a preimage: there is no room above for a collision.
    if (out.fortunate_below_beta && out.beta == kToy.w - 1) {
      ++top_level_fortunate;
      CHECK(out.kind == ReductionOutcome::Kind::preimage);
    }
  }
  CHECK(preimages > 0);
  CHECK(second_preimages > 0);
  CHECK(top_level_fortunate > 0);
}

TEST_CASE("extractor fails cleanly on trivial adversaries") {
  SeededRng rng(54);

  SECTION("give-up") {
    const GiveUpAdversary give_up;
    for (int trial = 0; trial < 20; ++trial) {
      const Challenge ch = make_challenge(rng);
      const ReductionOutcome out = run_extractor(give_up, kToy, ch.key, ch.y_c, ch.x_c, rng);
      CHECK(out.kind == ReductionOutcome::Kind::fail);
      CHECK(out.reason == FailReason::no_forgery);
      CHECK_FALSE(out.made_query);
    }
  }

  SECTION("replay is rejected as a stale message") {
    const ReplayAdversary replay;
    int answered = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const Challenge ch = make_challenge(rng);
      const ReductionOutcome out = run_extractor(replay, kToy, ch.key, ch.y_c, ch.x_c, rng);
      CHECK(out.kind == ReductionOutcome::Kind::fail);
      if (out.reason == FailReason::no_forgery) ++answered;  // query was answerable
      CHECK_FALSE(out.forgery_valid);
    }
    CHECK(answered > 0);
  }
}

TEST_CASE("fortunate probe output flags line up") {
  SeededRng rng(55);
  const BruteForceForger forger;
  const GiveUpAdversary give_up;

  int ones_fair = 0;
  int ones_planted = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const ProbeSample fair = sample_probe_chained(kToy, kToySpec, rng);
    const ProbeResult fr = run_fortunate_probe(forger, kToy, fair, rng);
    CHECK(fr.budget_ok);
    if (fr.output == 1) {
      ++ones_fair;
      CHECK(fr.forgery_valid);
      REQUIRE(fr.forgery_digit_alpha.has_value());
      CHECK(*fr.forgery_digit_alpha < fr.beta);
      REQUIRE(fr.query_digit_alpha.has_value());
      CHECK(*fr.query_digit_alpha >= fr.beta);
    }

    const ProbeSample planted = sample_probe_uniform(kToy, kToySpec, rng);
    if (run_fortunate_probe(forger, kToy, planted, rng).output == 1) ++ones_planted;

    CHECK(run_fortunate_probe(give_up, kToy, fair, rng).output == 0);
  }
  CHECK(ones_fair > 0);
  CHECK(ones_planted > 0);
}

TEST_CASE("hybrid embedding identity holds bitwise") {
  // Chaining the image of x from level i+1 equals chaining the masked x
  // from level i; this is the alignment the distinguisher relies on.
  SeededRng rng(56);
  const std::uint32_t w = 8;
  const Params p = derive_params(10, 10, w);
  const FamilySpec spec = FamilySpec::toy(10);
  for (int trial = 0; trial < 30; ++trial) {
    const FamilyKey key = sample_key(spec, rng);
    const BitmaskVector masks = sample_masks(spec, w, rng);
    const BitString x = random_bits(rng, 10);
    for (std::uint32_t beta_star = 1; beta_star <= w - 1; ++beta_star) {
      for (std::uint32_t i_star = 0; i_star < beta_star; ++i_star) {
        const BitString via_image =
            chain(key, evaluate(key, x), masks, i_star + 1, beta_star - i_star - 1);
        const BitString via_masked =
            chain(key, x ^ masks.masks[i_star], masks, i_star, beta_star - i_star);
        CHECK(via_image == via_masked);
      }
    }
  }
  (void)p;
}

TEST_CASE("distinguisher embedding costs and index checks") {
  SeededRng rng(57);
  const GiveUpAdversary give_up;
  const UdSample sample = sample_ud_uniform(kToySpec, rng);

  CHECK_THROWS_AS(run_ud_distinguisher(give_up, kToy, sample, 0, 0, rng), IndexRange);
  CHECK_THROWS_AS(run_ud_distinguisher(give_up, kToy, sample, 2, 2, rng), IndexRange);
  CHECK_THROWS_AS(run_ud_distinguisher(give_up, kToy, sample, kToy.w, 0, rng), IndexRange);

  for (std::uint32_t beta_star = 1; beta_star <= kToy.w - 1; ++beta_star) {
    for (std::uint32_t i_star = 0; i_star < beta_star; ++i_star) {
      const DistinguisherResult r =
          run_ud_distinguisher(give_up, kToy, sample, beta_star, i_star, rng);
      CHECK(r.embed_evaluations == beta_star - i_star - 1);
      CHECK(r.embed_evaluations <= kToy.w - 2);
      // i* = beta*-1 plants the sample value untouched.
      if (i_star + 1 == beta_star) CHECK(r.embed_evaluations == 0);
    }
  }
}

TEST_CASE("distinguisher inputs land on the matching hybrids") {
  // Rate comparison between the two routes to each hybrid: running the
  // distinguisher on an image (resp. uniform) sample must look exactly like
  // probing hybrid i* (resp. i*+1) directly.
  SeededRng rng(58);
  const BruteForceForger forger;
  const std::uint32_t beta_star = 2;
  const std::uint32_t i_star = 0;
  const int trials = 1500;

  int via_distinguisher_image = 0;
  int via_hybrid_low = 0;
  int via_distinguisher_uniform = 0;
  int via_hybrid_high = 0;
  for (int t = 0; t < trials; ++t) {
    {
      const UdSample s = sample_ud_image(kToySpec, rng);
      if (run_ud_distinguisher(forger, kToy, s, beta_star, i_star, rng).probe.output == 1) {
        ++via_distinguisher_image;
      }
    }
    {
      const ProbeSample s = sample_probe_hybrid(kToy, kToySpec, beta_star, i_star, rng);
      if (run_fortunate_probe(forger, kToy, s, rng).output == 1) ++via_hybrid_low;
    }
    {
      const UdSample s = sample_ud_uniform(kToySpec, rng);
      if (run_ud_distinguisher(forger, kToy, s, beta_star, i_star, rng).probe.output == 1) {
        ++via_distinguisher_uniform;
      }
    }
    {
      const ProbeSample s = sample_probe_hybrid(kToy, kToySpec, beta_star, i_star + 1, rng);
      if (run_fortunate_probe(forger, kToy, s, rng).output == 1) ++via_hybrid_high;
    }
  }
  // Two-sample tolerance: rates near 0.3 over 1500 trials have sigma about
  // 0.017; allow 4 sigma.
  const double d = static_cast<double>(trials);
  CHECK(std::abs(via_distinguisher_image - via_hybrid_low) / d < 0.07);
  CHECK(std::abs(via_distinguisher_uniform - via_hybrid_high) / d < 0.07);
}

TEST_CASE("brute-force oracles") {
  SeededRng rng(59);
  const FamilyKey key = sample_key(kToySpec, rng);

  SECTION("preimage of a known image") {
    for (int trial = 0; trial < 10; ++trial) {
      const BitString x0 = random_bits(rng, 8);
      const BitString y = evaluate(key, x0);
      const auto found = brute_force_preimage(key, y);
      REQUIRE(found.has_value());
      CHECK(evaluate(key, *found) == y);
    }
  }

  SECTION("second preimage exists iff the image is shared") {
    // Build the whole image table first, then check the oracle agrees with
    // it on every input. Counting multiplicities is the ground truth here.
    std::map<std::uint64_t, int> image_count;
    for (std::uint32_t v = 0; v < 256; ++v) {
      image_count[evaluate(key, BitString::from_uint(v, 8)).to_uint()] += 1;
    }
    int unique_seen = 0;
    int shared_seen = 0;
    for (std::uint32_t v = 0; v < 256 && (unique_seen < 5 || shared_seen < 5); ++v) {
      const BitString x = BitString::from_uint(v, 8);
      const auto found = brute_force_second_preimage(key, x);
      const bool shared = image_count[evaluate(key, x).to_uint()] > 1;
      CHECK(found.has_value() == shared);
      if (found) {
        ++shared_seen;
        CHECK(*found != x);
        CHECK(evaluate(key, *found) == evaluate(key, x));
      } else {
        ++unique_seen;
      }
    }
    CHECK(unique_seen > 0);
    CHECK(shared_seen > 0);
  }

  SECTION("fraction of inputs with a second preimage matches a random map") {
    // 1 - (1 - 2^-8)^255 ~ 0.632 of inputs should share their image.
    double total_fraction = 0;
    const int keys = 50;
    SeededRng key_rng(60);
    for (int k = 0; k < keys; ++k) {
      const FamilyKey fresh = sample_key(kToySpec, key_rng);
      std::map<std::uint64_t, int> counts;
      for (std::uint32_t v = 0; v < 256; ++v) {
        counts[evaluate(fresh, BitString::from_uint(v, 8)).to_uint()] += 1;
      }
      int with_second = 0;
      for (std::uint32_t v = 0; v < 256; ++v) {
        if (counts[evaluate(fresh, BitString::from_uint(v, 8)).to_uint()] > 1) ++with_second;
      }
      total_fraction += with_second / 256.0;
    }
    const double mean = total_fraction / keys;
    CHECK(mean > 0.632 - 0.1);
    CHECK(mean < 0.632 + 0.1);
  }

  SECTION("production domains refuse exhaustive search") {
    SeededRng prod_rng(61);
    const FamilyKey big = sample_key(FamilySpec::production(128), prod_rng);
    CHECK_THROWS_AS(brute_force_preimage(big, random_bits(prod_rng, 128)), DomainTooLarge);
    CHECK_THROWS_AS(brute_force_second_preimage(big, random_bits(prod_rng, 128)),
                    DomainTooLarge);
  }
}

TEST_CASE("digit walker never finds a forgeable message") {
  SeededRng rng(62);
  const DigitWalkerAdversary walker;
  for (int trial = 0; trial < 30; ++trial) {
    const Challenge ch = make_challenge(rng);
    const ReductionOutcome out = run_extractor(walker, kToy, ch.key, ch.y_c, ch.x_c, rng);
    CHECK(out.kind == ReductionOutcome::Kind::fail);
    CHECK_FALSE(out.forgery_valid);
  }
}

TEST_CASE("nasty adversary with the leak never lands on beta") {
  SeededRng rng(63);
  const NastyAdversary nasty;
  for (int trial = 0; trial < 300; ++trial) {
    const Challenge ch = make_challenge(rng);
    const ReductionOutcome out =
        run_extractor(nasty, kToy, ch.key, ch.y_c, ch.x_c, rng, /*leak_alpha=*/true);
    CHECK(out.made_query);
    CHECK_FALSE(out.query_hit_beta);
    CHECK(out.kind == ReductionOutcome::Kind::fail);
    CHECK(out.reason == FailReason::bad_query);
  }
}
