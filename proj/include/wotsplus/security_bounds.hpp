#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

#include "wotsplus/errors.hpp"
#include "wotsplus/params.hpp"

namespace wotsplus {

enum class Attack : std::uint8_t { classical, quantum };

enum class BoundKind : std::uint8_t { updated, prior };

inline std::string_view to_string(Attack a) {
  return a == Attack::classical ? "classical" : "quantum";
}

inline std::string_view to_string(BoundKind k) {
  return k == BoundKind::updated ? "updated" : "prior";
}

/// Component insecurities of the function family against an attacker with
/// budget t (counted in f_k evaluations): t/2^n classically, t/2^(n/2) for
/// a quadratic-speedup quantum search. Values are capped at 1.
struct InSecComponents {
  double ow = 0;
  double spr = 0;
  double ud = 0;
};

inline InSecComponents insec_model(Attack attack, std::uint32_t n_bits, double t_evals) {
  if (t_evals < 0) throw OutOfRange("negative time budget");
  const double exponent = attack == Attack::classical ? n_bits : n_bits / 2.0;
  const double v = std::min(1.0, t_evals * std::exp2(-exponent));
  return {v, v, v};
}

namespace detail {
inline void check_component(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw OutOfRange(std::string("insecurity component out of [0,1]: ") + name);
  }
}
}  // namespace detail

/// Updated forgery bound: lw * (w*ud + ow + w*spr), clamped to 1.
inline double insecurity_bound_updated(const Params& p, double ow, double spr, double ud) {
  detail::check_component(ow, "ow");
  detail::check_component(spr, "spr");
  detail::check_component(ud, "ud");
  const double lw = static_cast<double>(p.l) * p.w;
  return std::min(1.0, lw * (p.w * ud + ow + p.w * spr));
}

/// Previous bound from the literature: wl * max(ow, w*spr) + w*ud, clamped
/// to 1. Kept for side-by-side comparison output.
inline double insecurity_bound_prior(const Params& p, double ow, double spr, double ud) {
  detail::check_component(ow, "ow");
  detail::check_component(spr, "spr");
  detail::check_component(ud, "ud");
  const double lw = static_cast<double>(p.l) * p.w;
  return std::min(1.0, lw * std::max(ow, p.w * spr) + p.w * ud);
}

inline double insecurity_bound(const Params& p, BoundKind kind, const InSecComponents& c) {
  return kind == BoundKind::updated ? insecurity_bound_updated(p, c.ow, c.spr, c.ud)
                                    : insecurity_bound_prior(p, c.ow, c.spr, c.ud);
}

/// Security level in bits: an attack succeeding with probability >= 1/2 is
/// expected to need 2^(b-1) evaluations. Closed forms, assuming the attack
/// budget dwarfs the scheme's own 4lw evaluations:
///   updated: b = v - log2(l*w) - log2(2w+1)
///   prior:   b = v - log2(w)   - log2(l*w+1)
/// with v = n classically and n/2 against quantum search. Levels are real
/// numbers; display may floor them.
inline double security_level(std::uint32_t n, std::uint32_t w, std::uint32_t m, Attack attack,
                             BoundKind kind) {
  const Params p = derive_params(n, m, w);
  const double v = attack == Attack::classical ? n : n / 2.0;
  const double lw = static_cast<double>(p.l) * p.w;
  if (kind == BoundKind::updated) {
    return v - std::log2(lw) - std::log2(2.0 * p.w + 1.0);
  }
  return v - std::log2(static_cast<double>(p.w)) - std::log2(lw + 1.0);
}

/// Same level computed the long way round: bisect for the budget t at which
/// the insecurity bound crosses 1/2, then b = log2(t) + 1. Cross-checks the
/// closed form through the generic bound evaluation path.
inline double security_level_numeric(std::uint32_t n, std::uint32_t w, std::uint32_t m,
                                     Attack attack, BoundKind kind) {
  const Params p = derive_params(n, m, w);
  const double v = attack == Attack::classical ? n : n / 2.0;
  double lo = -64.0, hi = v + 64.0;  // log2(t) bracket; bound is monotone in t
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = (lo + hi) / 2;
    const double value = insecurity_bound(p, kind, insec_model(attack, n, std::exp2(mid)));
    (value < 0.5 ? lo : hi) = mid;
  }
  return (lo + hi) / 2 + 1.0;
}

/// Level drop of the updated bound relative to the prior one; identical for
/// every attack model: log2(l(2w+1) / (lw+1)).
inline double level_gap(std::uint32_t n, std::uint32_t w, std::uint32_t m) {
  const Params p = derive_params(n, m, w);
  return std::log2(static_cast<double>(p.l) * (2.0 * p.w + 1.0) /
                   (static_cast<double>(p.l) * p.w + 1.0));
}

struct BoundReport {
  Attack attack;
  BoundKind kind;
  std::uint32_t n, w, m, l;
  double level_bits;
};

inline std::vector<BoundReport> comparison_table(std::uint32_t n, std::uint32_t w,
                                                 std::uint32_t m) {
  const Params p = derive_params(n, m, w);
  std::vector<BoundReport> rows;
  for (Attack attack : {Attack::classical, Attack::quantum}) {
    for (BoundKind kind : {BoundKind::prior, BoundKind::updated}) {
      rows.push_back({attack, kind, n, w, m, p.l, security_level(n, w, m, attack, kind)});
    }
  }
  return rows;
}

}  // namespace wotsplus
