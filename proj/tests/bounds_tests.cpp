#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <string>

#include "mcperturb/bounds.hpp"
#include "mcperturb/errors.hpp"

using namespace mcperturb;
using namespace mcperturb::bounds;

TEST_CASE("stationary norm bounds: frozen values and ordering") {
  StationaryNormBounds r = stationary_norm_bounds(0.5, 0.25);
  REQUIRE(r.sharp.applicable);
  CHECK(*r.sharp.value == doctest::Approx(1.1547005383792515).epsilon(1e-14));
  CHECK(*r.coarse.value == doctest::Approx(2.0).epsilon(1e-14));

  for (double alpha : {0.1, 0.3, 0.7, 1.0}) {
    for (double frac : {0.0, 0.2, 0.5, 0.9, 0.999}) {
      StationaryNormBounds b = stationary_norm_bounds(alpha, frac * alpha);
      CHECK(*b.sharp.value <= *b.coarse.value + 1e-14);
      CHECK(*b.sharp.value >= 1.0);
    }
  }
}

TEST_CASE("stationary gap bounds: frozen values, ordering, and gating") {
  StationaryGapBounds r = stationary_gap_bounds(0.5, 0.3);
  CHECK(*r.b2.value == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(*r.b0.value == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(*r.b1.value ==
        doctest::Approx((0.3 / 0.2) * std::sqrt(2.0 * 0.5 / 0.3 - 1.0)).epsilon(1e-14));

  // The sharp bound never exceeds the looser closed form.
  for (double alpha : {0.05, 0.2, 0.5, 0.95}) {
    for (double frac : {1e-6, 1e-3, 0.1, 0.5, 0.99}) {
      StationaryGapBounds b = stationary_gap_bounds(alpha, frac * alpha);
      CHECK(*b.b2.value <= *b.b1.value + 1e-14);
    }
  }

  // At epsilon = 0 the square-root form degenerates; b1 is not applicable.
  StationaryGapBounds zero = stationary_gap_bounds(0.4, 0.0);
  CHECK(zero.b0.applicable);
  CHECK(*zero.b0.value == 0.0);
  CHECK_FALSE(zero.b1.applicable);
  CHECK_FALSE(zero.b1.value.has_value());
  CHECK(*zero.b2.value == 0.0);
  CHECK_THROWS_AS(zero.b1.require(), PreconditionError);

  // At epsilon >= alpha nothing applies.
  StationaryGapBounds gone = stationary_gap_bounds(0.4, 0.4);
  CHECK_FALSE(gone.b0.applicable);
  CHECK_FALSE(gone.b1.applicable);
  CHECK_FALSE(gone.b2.applicable);
}

TEST_CASE("gap-bound ratios approach their limits as epsilon shrinks") {
  const double alpha = 0.37;
  for (int k = 2; k <= 6; ++k) {
    const double eps = alpha * std::pow(10.0, -k);
    StationaryGapBounds b = stationary_gap_bounds(alpha, eps);
    const double r20 = *b.b2.value / *b.b0.value;
    CHECK(r20 >= 1.0);
    CHECK(r20 - 1.0 <= std::pow(10.0, 1 - 2 * k));
    // b1/b0 grows like sqrt(2 alpha / eps): normalized it tends to one.
    const double r10 = *b.b1.value / *b.b0.value * std::sqrt(eps / (2.0 * alpha));
    CHECK(std::abs(r10 - 1.0) <= std::pow(10.0, -k + 1));
  }
}

TEST_CASE("finite-time bound: frozen value, monotonicity, zero-epsilon case") {
  BoundResult r = finite_time_l2_bound(0.2, 0.05, 10, 1.0);
  CHECK(*r.value ==
        doctest::Approx(std::pow(0.85, 10) + 0.05 / std::sqrt(0.2 * 0.2 - 0.05 * 0.05))
            .epsilon(1e-14));

  double prev = *finite_time_l2_bound(0.3, 0.1, 0, 2.0).value;
  for (long n = 1; n <= 40; ++n) {
    const double cur = *finite_time_l2_bound(0.3, 0.1, n, 2.0).value;
    CHECK(cur <= prev + 1e-15);
    prev = cur;
  }

  // Without perturbation the tail term vanishes and the rate is 1 - alpha.
  BoundResult clean = finite_time_l2_bound(0.25, 0.0, 4, 1.0);
  CHECK(*clean.value == doctest::Approx(std::pow(0.75, 4)).epsilon(1e-14));

  CHECK_FALSE(finite_time_l2_bound(0.2, 0.25, 3, 1.0).applicable);
}

TEST_CASE("cesaro bound: frozen value and decay in t") {
  CHECK(*cesaro_bound(0.5, 0.0, 4, 1.0).value == doctest::Approx(0.46875).epsilon(1e-14));

  double prev = *cesaro_bound(0.5, 0.1, 1, 1.0).value;
  for (long t = 2; t <= 64; t *= 2) {
    const double cur = *cesaro_bound(0.5, 0.1, t, 1.0).value;
    CHECK(cur <= prev);
    prev = cur;
  }
  // The tail never drops below the asymptotic term.
  CHECK(prev >= 0.1 / std::sqrt(0.24) - 1e-14);
  CHECK(*cesaro_bound(0.5, 0.1, 10000000, 1.0).value ==
        doctest::Approx(0.1 / std::sqrt(0.24)).epsilon(1e-5));

  CHECK_THROWS_AS(cesaro_bound(0.5, 0.1, 0, 1.0), InvalidInputError);
}

TEST_CASE("stationary covariance bound") {
  BoundResult r = covariance_bound_stationary(0.8, 3, 0.5, 0.25);
  CHECK(*r.value == doctest::Approx(std::pow(0.8, 3) * 0.125).epsilon(1e-14));
  CHECK(*covariance_bound_stationary(0.8, 0, 0.5, 0.5).value == doctest::Approx(0.25));
  CHECK_THROWS_AS(covariance_bound_stationary(1.0, 3, 0.5, 0.25), InvalidInputError);
  CHECK_THROWS_AS(covariance_bound_stationary(0.8, -1, 0.5, 0.25), InvalidInputError);
}

TEST_CASE("nonstationary covariance bound is signed") {
  // Large bias product with tiny fluctuation terms drives the value negative;
  // it is reported as computed, not clamped.
  BoundResult r =
      covariance_bound_nonstationary(0.5, 8, 8, 0.01, 0.01, 0.01, 0.01, 0.1, 0.5, 0.5);
  CHECK(*r.value < 0.0);

  // Hand evaluation of every term.
  const double rate = 0.6;
  BoundResult h = covariance_bound_nonstationary(rate, 2, 4, 0.3, 0.4, 0.5, 0.6, 0.7, 0.1, -0.2);
  const double expected = std::pow(rate, 4.0) * 0.12 +
                          std::pow(2.0, 1.5) * std::pow(rate, 4.0) * 0.7 * 0.3 - (0.1 * -0.2);
  CHECK(*h.value == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("covariance sum bound: frozen value") {
  // With no start-distance term the bound is 2 star^2 / (gap t).
  BoundResult r = covariance_sum_bound(0.5, 10, 0.5, 0.9, 0.0, 0.0);
  CHECK(*r.value == doctest::Approx(0.1).epsilon(1e-14));
  CHECK_THROWS_AS(covariance_sum_bound(0.0, 10, 0.5, 0.9, 0.0, 0.0), InvalidInputError);
  CHECK_THROWS_AS(covariance_sum_bound(1.5, 10, 0.5, 0.9, 0.0, 0.0), InvalidInputError);
}

TEST_CASE("exact-chain mse bound: hand value and decay") {
  BoundResult r = mse_bound_exact(0.25, 8, 0.5, 0.75, 0.3);
  const double expected =
      2.0 * 0.25 / (0.25 * 8.0) + std::pow(2.0, 3.5) * 0.3 * 0.5625 / (0.0625 * 64.0);
  CHECK(*r.value == doctest::Approx(expected).epsilon(1e-14));

  double prev = *mse_bound_exact(0.25, 1, 0.5, 0.75, 0.3).value;
  for (long t = 2; t <= 512; t *= 2) {
    const double cur = *mse_bound_exact(0.25, t, 0.5, 0.75, 0.3).value;
    CHECK(cur < prev);
    prev = cur;
  }
}

TEST_CASE("perturbed mse bound: both forms, best, and gating") {
  PerturbedMseBounds r = mse_bound_perturbed(0.5, 0.1, 16, 0.4, 0.6, 0.2);
  const double g = 0.4;
  const double ratio = 0.01 / 0.24;
  const double bias = 0.1 / std::sqrt(0.24);
  const double v1 = 0.16 * (ratio + 2.0 * (1.0 + bias * 0.2) / (g * 16.0)) +
                    std::pow(2.0, 3.5) * 0.2 * 0.36 / (g * g * 256.0);
  const double v2 = 0.16 * (2.0 * ratio + 4.0 / (g * 16.0)) +
                    std::pow(2.0, 4.5) * 0.2 * 0.36 / (g * g * 256.0);
  CHECK(*r.form1.value == doctest::Approx(v1).epsilon(1e-14));
  CHECK(*r.form2.value == doctest::Approx(v2).epsilon(1e-14));
  CHECK(*r.best == doctest::Approx(std::min(v1, v2)).epsilon(1e-14));

  PerturbedMseBounds gone = mse_bound_perturbed(0.5, 0.6, 16, 0.4, 0.6, 0.2);
  CHECK_FALSE(gone.form1.applicable);
  CHECK_FALSE(gone.form2.applicable);
  CHECK_FALSE(gone.best.has_value());
}

TEST_CASE("input validation rejects out-of-range parameters") {
  CHECK_THROWS_AS(stationary_norm_bounds(0.0, 0.1), InvalidInputError);
  CHECK_THROWS_AS(stationary_norm_bounds(1.5, 0.1), InvalidInputError);
  CHECK_THROWS_AS(stationary_norm_bounds(0.5, -0.1), InvalidInputError);
  CHECK_THROWS_AS(finite_time_l2_bound(0.5, 0.1, -1, 1.0), InvalidInputError);
  CHECK_THROWS_AS(finite_time_l2_bound(0.5, 0.1, 3, -1.0), InvalidInputError);
  CHECK_THROWS_AS(mse_bound_exact(0.5, 4, -0.1, 0.5, 0.1), InvalidInputError);
}

TEST_CASE("named evaluation dispatches to the same closed forms") {
  using Map = std::map<std::string, double>;
  BoundResult a = evaluate("stationary_gap_b2", Map{{"alpha", 0.5}, {"epsilon", 0.3}});
  CHECK(*a.value == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(a.id == Formula::stationary_gap_b2);

  BoundResult b = evaluate("cesaro", Map{{"alpha", 0.5}, {"epsilon", 0.0}, {"t", 4}, {"dist", 1}});
  CHECK(*b.value == doctest::Approx(0.46875).epsilon(1e-14));

  BoundResult c = evaluate("mse_perturbed_form1",
                           Map{{"alpha", 0.5},
                               {"epsilon", 0.1},
                               {"t", 16},
                               {"star_eps_f", 0.4},
                               {"starstar_eps_f", 0.6},
                               {"dist_mu_eps", 0.2}});
  CHECK(*c.value ==
        doctest::Approx(*mse_bound_perturbed(0.5, 0.1, 16, 0.4, 0.6, 0.2).form1.value));

  CHECK_THROWS_AS(evaluate("no_such_formula", Map{}), SpecParseError);
  CHECK_THROWS_AS(evaluate("cesaro", Map{{"alpha", 0.5}, {"epsilon", 0.0}, {"dist", 1}}),
                  SpecParseError);
  CHECK_THROWS_AS(
      evaluate("cesaro", Map{{"alpha", 0.5}, {"epsilon", 0.0}, {"t", 4.5}, {"dist", 1}}),
      SpecParseError);
}
