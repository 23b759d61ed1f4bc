#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "wotsplus/adversaries.hpp"
#include "wotsplus/reduction.hpp"

namespace wotsplus {

struct WilsonInterval {
  double low = 0;
  double high = 1;
};

/// Wilson score interval for a binomial proportion (default 95%).
inline WilsonInterval wilson_interval(std::uint64_t successes, std::uint64_t trials,
                                      double z = 1.959964) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = p + z2 / (2.0 * n);
  const double spread = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, (centre - spread) / denom), std::min(1.0, (centre + spread) / denom)};
}

struct TrialConfig {
  Params params;
  FamilySpec family;
  std::string adversary = "brute-force";
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool leak_alpha = false;  // switched on automatically for "nasty"
};

/// Per-beta collision bookkeeping for the position-blindness statistic:
/// of the fortunate forgeries whose chain merged above beta, how many merged
/// exactly at the hidden gamma (and so yielded a second preimage).
struct BetaBin {
  std::uint64_t collision_trials = 0;
  std::uint64_t gamma_hits = 0;
};

struct TrialStats {
  std::uint64_t trials = 0;

  // Plain EU-CMA experiment against an honest key.
  std::uint64_t real_forgeries_valid = 0;

  // Extractor runs.
  std::uint64_t extractor_queries = 0;
  std::uint64_t extractor_query_hit_beta = 0;
  std::uint64_t extractor_forgeries_valid = 0;
  std::uint64_t fortunate_below_beta = 0;
  std::uint64_t fortunate_below_query = 0;
  std::uint64_t preimages = 0;
  std::uint64_t second_preimages = 0;
  std::uint64_t fail_bad_query = 0;
  std::uint64_t fail_no_forgery = 0;
  std::uint64_t fail_wrong_position = 0;
  std::uint64_t fail_collision_elsewhere = 0;
  std::uint64_t budget_violations = 0;
  std::uint64_t internal_inconsistencies = 0;
  std::uint64_t max_evaluations_used = 0;
  std::vector<BetaBin> beta_bins;  // index beta-1, for beta in 1..w-2

  // Fortunate-event probes: fair (chain-grown) and planted (uniform) tops.
  std::uint64_t probe_fair_ones = 0;
  std::uint64_t probe_planted_ones = 0;
  std::uint64_t probe_budget_violations = 0;

  TrialStats& merge(const TrialStats& other) {
    trials += other.trials;
    real_forgeries_valid += other.real_forgeries_valid;
    extractor_queries += other.extractor_queries;
    extractor_query_hit_beta += other.extractor_query_hit_beta;
    extractor_forgeries_valid += other.extractor_forgeries_valid;
    fortunate_below_beta += other.fortunate_below_beta;
    fortunate_below_query += other.fortunate_below_query;
    preimages += other.preimages;
    second_preimages += other.second_preimages;
    fail_bad_query += other.fail_bad_query;
    fail_no_forgery += other.fail_no_forgery;
    fail_wrong_position += other.fail_wrong_position;
    fail_collision_elsewhere += other.fail_collision_elsewhere;
    budget_violations += other.budget_violations;
    internal_inconsistencies += other.internal_inconsistencies;
    max_evaluations_used = std::max(max_evaluations_used, other.max_evaluations_used);
    if (beta_bins.size() < other.beta_bins.size()) beta_bins.resize(other.beta_bins.size());
    for (std::size_t i = 0; i < other.beta_bins.size(); ++i) {
      beta_bins[i].collision_trials += other.beta_bins[i].collision_trials;
      beta_bins[i].gamma_hits += other.beta_bins[i].gamma_hits;
    }
    probe_fair_ones += other.probe_fair_ones;
    probe_planted_ones += other.probe_planted_ones;
    probe_budget_violations += other.probe_budget_violations;
    return *this;
  }
};

struct TrialSummary {
  double eps_real = 0;     // valid-forgery rate against an honest key
  double eps_fair = 0;     // fortunate rate, fair samples
  double eps_planted = 0;  // fortunate rate, planted samples
  WilsonInterval real_ci, fair_ci, planted_ci;
  double ud_advantage_estimate = 0;  // |planted - fair|
  double counting_threshold = 0;     // eps_real / (l*w)
  bool counting_bound_ok = false;    // fair lower CI above the threshold
};

inline TrialSummary summarize(const TrialConfig& config, const TrialStats& s) {
  TrialSummary out;
  if (s.trials == 0) return out;
  const double n = static_cast<double>(s.trials);
  out.eps_real = static_cast<double>(s.real_forgeries_valid) / n;
  out.eps_fair = static_cast<double>(s.probe_fair_ones) / n;
  out.eps_planted = static_cast<double>(s.probe_planted_ones) / n;
  out.real_ci = wilson_interval(s.real_forgeries_valid, s.trials);
  out.fair_ci = wilson_interval(s.probe_fair_ones, s.trials);
  out.planted_ci = wilson_interval(s.probe_planted_ones, s.trials);
  out.ud_advantage_estimate = std::abs(out.eps_planted - out.eps_fair);
  out.counting_threshold =
      out.eps_real / (static_cast<double>(config.params.l) * config.params.w);
  out.counting_bound_ok = out.fair_ci.low > out.counting_threshold;
  return out;
}

struct RealExperimentResult {
  bool made_query = false;
  bool forgery_valid = false;
  std::uint64_t adversary_evaluations = 0;
};

/// The unforgeability experiment itself: honest key, honest one-time signing
/// oracle, forgery accepted iff it verifies on a message that was not
/// queried.
inline RealExperimentResult run_real_experiment(const Adversary& adversary,
                                                const Params& params, const FamilySpec& family,
                                                Rng& rng) {
  EvalCounter adversary_evals;
  KeyPair kp = keygen(params, family, rng);

  RealExperimentResult out;
  std::optional<BitString> queried;
  auto oracle = [&](const BitString& message) -> std::optional<Signature> {
    if (queried) throw Error("adversary exceeded the one-query limit");
    queried = message;
    out.made_query = true;
    return sign(kp.sk, message);
  };

  std::function<std::optional<Signature>(const BitString&)> oracle_fn = oracle;
  AdversaryContext ctx{kp.pk, oracle_fn, rng, adversary_evals, std::nullopt};
  std::optional<Forgery> forgery = adversary.run(ctx);
  out.adversary_evaluations = adversary_evals.count;
  if (!forgery) return out;

  const bool fresh = !queried || forgery->message != *queried;
  out.forgery_valid = fresh && verify(kp.pk, forgery->sig, forgery->message);
  return out;
}

namespace detail {

// Sub-stream ids per trial; every component of a trial draws from its own
// deterministic stream so trials can run in any order on any thread count.
enum TrialStream : std::uint64_t {
  kStreamKey = 0,
  kStreamChallenge = 1,
  kStreamExtractor = 2,
  kStreamReal = 3,
  kStreamFairSample = 4,
  kStreamFairProbe = 5,
  kStreamPlantedSample = 6,
  kStreamPlantedProbe = 7,
  kStreamsPerTrial = 16,
};

inline void run_one_trial(const TrialConfig& config, const Adversary& adversary,
                          std::uint64_t trial, TrialStats& stats) {
  const auto stream = [&](std::uint64_t component) {
    return SeededRng(config.seed, trial * kStreamsPerTrial + component);
  };

  stats.trials += 1;

  // Extractor run. The one-wayness target is the image of a uniform point,
  // the second-preimage target a uniform point, both under a fresh key.
  {
    SeededRng key_rng = stream(kStreamKey);
    const FamilyKey key = sample_key(config.family, key_rng);
    SeededRng challenge_rng = stream(kStreamChallenge);
    const BitString y_c = evaluate(key, random_bits(challenge_rng, config.params.n));
    const BitString x_c = random_bits(challenge_rng, config.params.n);

    SeededRng run_rng = stream(kStreamExtractor);
    try {
      const ReductionOutcome outcome = run_extractor(adversary, config.params, key, y_c, x_c,
                                                     run_rng, config.leak_alpha);
      if (outcome.made_query) {
        stats.extractor_queries += 1;
        if (outcome.query_hit_beta) stats.extractor_query_hit_beta += 1;
      }
      if (outcome.forgery_valid) stats.extractor_forgeries_valid += 1;
      if (outcome.fortunate_below_beta) stats.fortunate_below_beta += 1;
      if (outcome.fortunate_below_query) stats.fortunate_below_query += 1;
      if (!outcome.budget_ok) stats.budget_violations += 1;
      stats.max_evaluations_used = std::max(stats.max_evaluations_used,
                                            outcome.evaluations_used);

      switch (outcome.kind) {
        case ReductionOutcome::Kind::preimage:
          stats.preimages += 1;
          break;
        case ReductionOutcome::Kind::second_preimage:
          stats.second_preimages += 1;
          break;
        case ReductionOutcome::Kind::fail:
          switch (outcome.reason) {
            case FailReason::bad_query: stats.fail_bad_query += 1; break;
            case FailReason::wrong_position: stats.fail_wrong_position += 1; break;
            case FailReason::collision_elsewhere: stats.fail_collision_elsewhere += 1; break;
            default: stats.fail_no_forgery += 1; break;
          }
          break;
      }

      // Position blindness: a fortunate forgery with beta < w-1 that did not
      // hit y_c at beta merged somewhere above it; it extracted a second
      // preimage exactly when the merge level was gamma.
      const bool collision_type =
          outcome.fortunate_below_beta &&
          (outcome.kind == ReductionOutcome::Kind::second_preimage ||
           (outcome.kind == ReductionOutcome::Kind::fail &&
            outcome.reason == FailReason::collision_elsewhere));
      if (collision_type && outcome.beta + 1 < config.params.w) {
        if (stats.beta_bins.size() < config.params.w - 2) {
          stats.beta_bins.resize(config.params.w - 2);
        }
        BetaBin& bin = stats.beta_bins[outcome.beta - 1];
        bin.collision_trials += 1;
        if (outcome.kind == ReductionOutcome::Kind::second_preimage) bin.gamma_hits += 1;
      }
    } catch (const InternalInconsistency&) {
      stats.internal_inconsistencies += 1;
    }
  }

  // Honest experiment for the real forgery rate.
  {
    SeededRng run_rng = stream(kStreamReal);
    const RealExperimentResult real =
        run_real_experiment(adversary, config.params, config.family, run_rng);
    if (real.forgery_valid) stats.real_forgeries_valid += 1;
  }

  // Fortunate-event probes on both sample distributions.
  {
    SeededRng sample_rng = stream(kStreamFairSample);
    const ProbeSample sample = sample_probe_chained(config.params, config.family, sample_rng);
    SeededRng run_rng = stream(kStreamFairProbe);
    const ProbeResult r =
        run_fortunate_probe(adversary, config.params, sample, run_rng, config.leak_alpha);
    if (r.output == 1) stats.probe_fair_ones += 1;
    if (!r.budget_ok) stats.probe_budget_violations += 1;
  }
  {
    SeededRng sample_rng = stream(kStreamPlantedSample);
    const ProbeSample sample = sample_probe_uniform(config.params, config.family, sample_rng);
    SeededRng run_rng = stream(kStreamPlantedProbe);
    const ProbeResult r =
        run_fortunate_probe(adversary, config.params, sample, run_rng, config.leak_alpha);
    if (r.output == 1) stats.probe_planted_ones += 1;
    if (!r.budget_ok) stats.probe_budget_violations += 1;
  }
}

}  // namespace detail

/// Runs `config.trials` independent trials. Each trial seeds every component
/// from (seed, trial index), so results are identical for any thread count
/// and partial sums merge commutatively.
inline TrialStats run_trials(const TrialConfig& config) {
  if (config.family.n_bits > kToyMaxBits) {
    throw DomainTooLarge("trial harness runs toy parameters only (n <= 20)");
  }
  TrialConfig cfg = config;
  if (cfg.adversary == "nasty") cfg.leak_alpha = true;
  const std::unique_ptr<Adversary> adversary = make_adversary(cfg.adversary);

  const unsigned threads = std::max(1u, cfg.threads);
  if (threads == 1 || cfg.trials < 2 * threads) {
    TrialStats stats;
    for (std::uint64_t t = 0; t < cfg.trials; ++t) {
      detail::run_one_trial(cfg, *adversary, t, stats);
    }
    return stats;
  }

  std::vector<TrialStats> partial(threads);
  std::vector<std::thread> workers;
  workers.reserve(threads);
  for (unsigned i = 0; i < threads; ++i) {
    workers.emplace_back([&, i] {
      for (std::uint64_t t = i; t < cfg.trials; t += threads) {
        detail::run_one_trial(cfg, *adversary, t, partial[i]);
      }
    });
  }
  for (auto& worker : workers) worker.join();

  TrialStats stats;
  for (const TrialStats& p : partial) stats.merge(p);
  return stats;
}

// ---------------------------------------------------------------------------
// Hybrid sweep
// ---------------------------------------------------------------------------

struct HybridCell {
  std::uint32_t beta_star = 0;
  std::uint32_t i_star = 0;
  std::uint64_t trials_each = 0;
  std::uint64_t ones_image = 0;    // sample value was f_k(uniform)
  std::uint64_t ones_uniform = 0;  // sample value was uniform
  std::uint64_t max_embed_evaluations = 0;
};

/// Sweeps every (beta*, i*) cell instead of trusting the existence argument:
/// for each cell the distinguisher runs on both input distributions and the
/// per-cell rate difference estimates the adjacent-hybrid advantage.
inline std::vector<HybridCell> run_hybrid_sweep(const TrialConfig& config) {
  if (config.family.n_bits > kToyMaxBits) {
    throw DomainTooLarge("trial harness runs toy parameters only (n <= 20)");
  }
  const std::unique_ptr<Adversary> adversary = make_adversary(config.adversary);

  std::vector<HybridCell> cells;
  std::uint64_t cell_index = 0;
  for (std::uint32_t beta_star = 1; beta_star <= config.params.w - 1; ++beta_star) {
    for (std::uint32_t i_star = 0; i_star < beta_star; ++i_star) {
      HybridCell cell{beta_star, i_star, config.trials, 0, 0, 0};
      for (std::uint64_t t = 0; t < config.trials; ++t) {
        const std::uint64_t base = (cell_index * config.trials + t) * 4;
        for (int which = 0; which < 2; ++which) {
          SeededRng sample_rng(config.seed, base + 2 * which);
          SeededRng run_rng(config.seed, base + 2 * which + 1);
          const UdSample sample = which == 0 ? sample_ud_image(config.family, sample_rng)
                                             : sample_ud_uniform(config.family, sample_rng);
          const DistinguisherResult r = run_ud_distinguisher(
              *adversary, config.params, sample, beta_star, i_star, run_rng);
          cell.max_embed_evaluations =
              std::max(cell.max_embed_evaluations, r.embed_evaluations);
          if (r.probe.output == 1) (which == 0 ? cell.ones_image : cell.ones_uniform) += 1;
        }
      }
      cells.push_back(cell);
      ++cell_index;
    }
  }
  return cells;
}

// ---------------------------------------------------------------------------
// Record-stream output
// ---------------------------------------------------------------------------

/// Line-delimited JSON records. Schema (one object per line):
///   {"record":"harness-config", n, m, w, l, adversary, trials, seed}
///   {"record":"trial-stats", ...counts...}
///   {"record":"summary", eps_real, eps_fair, eps_planted, ci fields,
///    ud_advantage_estimate, counting_threshold, counting_bound_ok}
///   {"record":"beta-bin", beta, collision_trials, gamma_hits, expected_rate}
inline void write_stats_records(std::ostream& os, const TrialConfig& config,
                                const TrialStats& s) {
  using nlohmann::json;
  os << json{{"record", "harness-config"},
             {"n", config.params.n},
             {"m", config.params.m},
             {"w", config.params.w},
             {"l", config.params.l},
             {"adversary", config.adversary},
             {"trials", config.trials},
             {"seed", config.seed},
             {"leak_alpha", config.leak_alpha || config.adversary == "nasty"}}
     << '\n';
  os << json{{"record", "trial-stats"},
             {"trials", s.trials},
             {"real_forgeries_valid", s.real_forgeries_valid},
             {"extractor_queries", s.extractor_queries},
             {"extractor_query_hit_beta", s.extractor_query_hit_beta},
             {"extractor_forgeries_valid", s.extractor_forgeries_valid},
             {"fortunate_below_beta", s.fortunate_below_beta},
             {"fortunate_below_query", s.fortunate_below_query},
             {"preimages", s.preimages},
             {"second_preimages", s.second_preimages},
             {"fail_bad_query", s.fail_bad_query},
             {"fail_no_forgery", s.fail_no_forgery},
             {"fail_wrong_position", s.fail_wrong_position},
             {"fail_collision_elsewhere", s.fail_collision_elsewhere},
             {"budget_violations", s.budget_violations},
             {"probe_budget_violations", s.probe_budget_violations},
             {"internal_inconsistencies", s.internal_inconsistencies},
             {"max_evaluations_used", s.max_evaluations_used}}
     << '\n';
  const TrialSummary sum = summarize(config, s);
  os << json{{"record", "summary"},
             {"eps_real", sum.eps_real},
             {"eps_real_ci", {sum.real_ci.low, sum.real_ci.high}},
             {"eps_fair", sum.eps_fair},
             {"eps_fair_ci", {sum.fair_ci.low, sum.fair_ci.high}},
             {"eps_planted", sum.eps_planted},
             {"eps_planted_ci", {sum.planted_ci.low, sum.planted_ci.high}},
             {"ud_advantage_estimate", sum.ud_advantage_estimate},
             {"counting_threshold", sum.counting_threshold},
             {"counting_bound_ok", sum.counting_bound_ok}}
     << '\n';
  for (std::size_t i = 0; i < s.beta_bins.size(); ++i) {
    if (s.beta_bins[i].collision_trials == 0) continue;
    const std::uint32_t beta = static_cast<std::uint32_t>(i) + 1;
    os << json{{"record", "beta-bin"},
               {"beta", beta},
               {"collision_trials", s.beta_bins[i].collision_trials},
               {"gamma_hits", s.beta_bins[i].gamma_hits},
               {"expected_rate", 1.0 / (config.params.w - 1 - beta)}}
       << '\n';
  }
}

inline void write_hybrid_records(std::ostream& os, const TrialConfig& config,
                                 const std::vector<HybridCell>& cells) {
  using nlohmann::json;
  os << json{{"record", "hybrid-config"},
             {"n", config.params.n},
             {"m", config.params.m},
             {"w", config.params.w},
             {"adversary", config.adversary},
             {"trials_per_cell", config.trials},
             {"seed", config.seed}}
     << '\n';
  for (const HybridCell& c : cells) {
    const double rate_image = c.trials_each ? static_cast<double>(c.ones_image) / c.trials_each : 0;
    const double rate_uniform =
        c.trials_each ? static_cast<double>(c.ones_uniform) / c.trials_each : 0;
    os << json{{"record", "hybrid-cell"},
               {"beta_star", c.beta_star},
               {"i_star", c.i_star},
               {"trials_each", c.trials_each},
               {"ones_image", c.ones_image},
               {"ones_uniform", c.ones_uniform},
               {"rate_image", rate_image},
               {"rate_uniform", rate_uniform},
               {"advantage", std::abs(rate_image - rate_uniform)},
               {"max_embed_evaluations", c.max_embed_evaluations}}
       << '\n';
  }
}

inline std::string render_stats_text(const TrialConfig& config, const TrialStats& s) {
  const TrialSummary sum = summarize(config, s);
  std::ostringstream os;
  os << "trials: " << s.trials << "  adversary: " << config.adversary << "  (n=" << config.params.n
     << " m=" << config.params.m << " w=" << config.params.w << " l=" << config.params.l
     << ")\n";
  auto rate = [&](std::uint64_t k) {
    return s.trials ? static_cast<double>(k) / static_cast<double>(s.trials) : 0.0;
  };
  os << "  eps (real forgery rate)       : " << sum.eps_real << "  [" << sum.real_ci.low << ", "
     << sum.real_ci.high << "]\n";
  os << "  eps~ (planted fortunate rate) : " << sum.eps_planted << "  [" << sum.planted_ci.low
     << ", " << sum.planted_ci.high << "]\n";
  os << "  eps^ (fair fortunate rate)    : " << sum.eps_fair << "  [" << sum.fair_ci.low << ", "
     << sum.fair_ci.high << "]\n";
  os << "  UD advantage estimate |eps~ - eps^| : " << sum.ud_advantage_estimate << "\n";
  os << "  extraction: " << s.preimages << " preimages, " << s.second_preimages
     << " second preimages\n";
  os << "  fails: bad-query " << s.fail_bad_query << ", no-forgery " << s.fail_no_forgery
     << ", wrong-position " << s.fail_wrong_position << ", collision-elsewhere "
     << s.fail_collision_elsewhere << "\n";
  os << "  query hit beta rate: " << rate(s.extractor_query_hit_beta) << "\n";
  os << "  budget violations: " << s.budget_violations + s.probe_budget_violations
     << ", internal inconsistencies: " << s.internal_inconsistencies << "\n";
  os << "  counting bound  eps^_low > eps/(l*w):  " << sum.fair_ci.low << " > "
     << sum.counting_threshold << "  -> " << (sum.counting_bound_ok ? "PASS" : "FAIL") << "\n";
  for (std::size_t i = 0; i < s.beta_bins.size(); ++i) {
    const BetaBin& bin = s.beta_bins[i];
    if (bin.collision_trials == 0) continue;
    const std::uint32_t beta = static_cast<std::uint32_t>(i) + 1;
    os << "  beta=" << beta << " collisions: " << bin.collision_trials << ", at-gamma "
       << bin.gamma_hits << " (rate " << static_cast<double>(bin.gamma_hits) / bin.collision_trials
       << ", blind expectation " << 1.0 / (config.params.w - 1 - beta) << ")\n";
  }
  return os.str();
}

}  // namespace wotsplus
