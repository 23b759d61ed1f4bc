#include <catch_amalgamated.hpp>

#include <cmath>

#include "wotsplus/security_bounds.hpp"

using namespace wotsplus;

TEST_CASE("insecurity bounds on simple inputs") {
  const Params p = derive_params(256, 256, 16);  // l = 67

  CHECK(insecurity_bound_updated(p, 0, 0, 0) == 0.0);
  CHECK(insecurity_bound_prior(p, 0, 0, 0) == 0.0);

  const double eps = 1e-9;
  const double lw = 67.0 * 16.0;
  CHECK(insecurity_bound_updated(p, eps, eps, eps) ==
        Catch::Approx(lw * (2.0 * 16.0 + 1.0) * eps).epsilon(1e-12));
  CHECK(insecurity_bound_prior(p, eps, eps, eps) ==
        Catch::Approx((lw * 16.0 + 16.0) * eps).epsilon(1e-12));

  // Direct arithmetic: components 2^-216 give 1072 * 33 * 2^-216 ~ 2^-200.89.
  const double comp = std::exp2(-216.0);
  const double bound = insecurity_bound_updated(p, comp, comp, comp);
  CHECK(bound == Catch::Approx(1072.0 * 33.0 * std::exp2(-216.0)).epsilon(1e-12));
  CHECK(std::log2(bound) == Catch::Approx(-200.8895).margin(1e-3));
}

TEST_CASE("bounds clamp to 1 and reject bad components") {
  const Params p = derive_params(256, 256, 16);
  CHECK(insecurity_bound_updated(p, 1.0, 1.0, 1.0) == 1.0);
  CHECK(insecurity_bound_prior(p, 1.0, 1.0, 1.0) == 1.0);
  CHECK_THROWS_AS(insecurity_bound_updated(p, -0.1, 0, 0), OutOfRange);
  CHECK_THROWS_AS(insecurity_bound_prior(p, 0, 1.5, 0), OutOfRange);
  CHECK_THROWS_AS(insec_model(Attack::classical, 256, -1.0), OutOfRange);
}

TEST_CASE("attack models") {
  const InSecComponents classical = insec_model(Attack::classical, 128, 1024.0);
  CHECK(classical.ow == Catch::Approx(std::exp2(10.0 - 128.0)));
  CHECK(classical.ow == classical.spr);
  CHECK(classical.ow == classical.ud);
  const InSecComponents quantum = insec_model(Attack::quantum, 128, 1024.0);
  CHECK(quantum.ow == Catch::Approx(std::exp2(10.0 - 64.0)));
}

TEST_CASE("security levels at the deployed parameter set") {
  CHECK(security_level(256, 16, 256, Attack::classical, BoundKind::updated) ==
        Catch::Approx(240.8895).margin(1e-3));
  CHECK(security_level(256, 16, 256, Attack::classical, BoundKind::prior) ==
        Catch::Approx(241.9326).margin(1e-3));
  CHECK(security_level(256, 16, 256, Attack::quantum, BoundKind::updated) ==
        Catch::Approx(112.8895).margin(1e-3));
  CHECK(security_level(256, 16, 256, Attack::quantum, BoundKind::prior) ==
        Catch::Approx(113.9326).margin(1e-3));
}

TEST_CASE("the two bounds differ by exactly the closed-form gap") {
  for (std::uint32_t n : {128u, 192u, 256u}) {
    for (std::uint32_t w : {4u, 16u, 64u}) {
      for (std::uint32_t m : {128u, 256u}) {
        const double gap = level_gap(n, w, m);
        for (Attack attack : {Attack::classical, Attack::quantum}) {
          const double prior = security_level(n, w, m, attack, BoundKind::prior);
          const double updated = security_level(n, w, m, attack, BoundKind::updated);
          CHECK(prior - updated == Catch::Approx(gap).margin(1e-9));
        }
      }
    }
  }
  CHECK(level_gap(256, 16, 256) == Catch::Approx(std::log2(67.0 * 33.0 / 1073.0)).margin(1e-12));
  CHECK(level_gap(256, 16, 256) == Catch::Approx(1.0431).margin(1e-3));
}

TEST_CASE("closed form matches the numeric root of the bound") {
  for (std::uint32_t n : {128u, 256u}) {
    for (std::uint32_t w : {2u, 16u, 256u}) {
      for (std::uint32_t m : {128u, 256u}) {
        for (Attack attack : {Attack::classical, Attack::quantum}) {
          for (BoundKind kind : {BoundKind::updated, BoundKind::prior}) {
            CHECK(security_level(n, w, m, attack, kind) ==
                  Catch::Approx(security_level_numeric(n, w, m, attack, kind)).margin(1e-6));
          }
        }
      }
    }
  }
}

TEST_CASE("levels fall with w and m, rise with n") {
  double previous = 1e9;
  for (std::uint32_t w : {2u, 4u, 8u, 16u, 32u, 64u, 128u, 256u}) {
    const double level = security_level(256, w, 256, Attack::classical, BoundKind::updated);
    CHECK(level < previous);
    previous = level;
  }

  previous = 1e9;
  for (std::uint32_t m : {64u, 128u, 256u, 512u, 1024u}) {
    // Longer digests mean more chains (larger l), hence lower levels.
    const double level = security_level(256, 16, m, Attack::classical, BoundKind::updated);
    CHECK(level < previous);
    previous = level;
  }

  previous = -1e9;
  for (std::uint32_t n : {128u, 192u, 256u}) {
    const double level = security_level(n, 16, 256, Attack::classical, BoundKind::updated);
    CHECK(level > previous);
    previous = level;
  }
}

TEST_CASE("comparison table covers both attacks and both bounds") {
  const auto rows = comparison_table(256, 16, 256);
  REQUIRE(rows.size() == 4);
  for (const auto& row : rows) {
    CHECK(row.l == 67);
    CHECK(row.level_bits ==
          Catch::Approx(security_level(row.n, row.w, row.m, row.attack, row.kind)));
  }
}
