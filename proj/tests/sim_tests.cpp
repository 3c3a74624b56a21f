#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstddef>
#include <vector>

#include "mcperturb/chain.hpp"
#include "mcperturb/errors.hpp"
#include "mcperturb/noisy_mh.hpp"
#include "mcperturb/oracle.hpp"
#include "mcperturb/sim.hpp"

using namespace mcperturb;
using namespace mcperturb::sim;

namespace {

noisy::TargetSpec two_to_one() { return noisy::TargetSpec({2.0, 1.0}); }

noisy::ProposalSpec uniform_proposal(int n) {
  Matrix q(n, n, 1.0 / static_cast<double>(n));
  return noisy::ProposalSpec(TransitionKernel(std::move(q)));
}

}  // namespace

TEST_CASE("identical configurations give identical output") {
  const Observable f({1.0, 0.0});
  SimConfig cfg;
  cfg.steps = 50;
  cfg.replicates = 8;
  cfg.seed = 99;
  const SimResult a = run_mh(two_to_one(), uniform_proposal(2), f, cfg);
  const SimResult b = run_mh(two_to_one(), uniform_proposal(2), f, cfg);
  REQUIRE(a.averages.size() == b.averages.size());
  for (std::size_t i = 0; i < a.averages.size(); ++i) {
    CHECK(a.averages[i] == b.averages[i]);
    CHECK(a.rng_streams[i] == b.rng_streams[i]);
  }
  for (int i = 0; i < 2; ++i) CHECK(a.occupancy[i] == b.occupancy[i]);
  CHECK(a.acceptance_rate == b.acceptance_rate);
}

TEST_CASE("a degenerate noise model replays the clean sampler exactly") {
  const Observable f({1.0, 0.0});
  SimConfig cfg;
  cfg.steps = 200;
  cfg.replicates = 5;
  cfg.seed = 7;
  const SimResult clean = run_mh(two_to_one(), uniform_proposal(2), f, cfg);
  const SimResult noisy_run =
      run_noisy_mh(two_to_one(), uniform_proposal(2), noisy::NoiseModel::noiseless(2), f, cfg);
  for (std::size_t i = 0; i < clean.averages.size(); ++i) {
    CHECK(clean.averages[i] == noisy_run.averages[i]);
  }
  CHECK(clean.acceptance_rate == noisy_run.acceptance_rate);
}

TEST_CASE("burn-in and thinning control the retained sample count") {
  const Observable f({1.0, 0.0});
  SimConfig cfg;
  cfg.steps = 10;
  cfg.replicates = 3;
  cfg.seed = 1;
  cfg.burn_in = 3;
  cfg.thinning = 2;
  const SimResult r = run_mh(two_to_one(), uniform_proposal(2), f, cfg);
  CHECK(r.retained_per_replicate == 4);

  cfg.burn_in = 0;
  cfg.thinning = 1;
  const SimResult full = run_mh(two_to_one(), uniform_proposal(2), f, cfg);
  CHECK(full.retained_per_replicate == 10);
}

TEST_CASE("occupancy fractions are normalized per replicate and pooled") {
  const Observable f({1.0, 0.0});
  SimConfig cfg;
  cfg.steps = 33;
  cfg.replicates = 6;
  cfg.seed = 3;
  cfg.thinning = 3;
  const SimResult r = run_mh(two_to_one(), uniform_proposal(2), f, cfg);
  double pooled = 0.0;
  for (int i = 0; i < 2; ++i) pooled += r.occupancy[i];
  CHECK(pooled == doctest::Approx(1.0).epsilon(1e-12));
  for (int rep = 0; rep < 6; ++rep) {
    double row = 0.0;
    for (int i = 0; i < 2; ++i) row += r.replicate_occupancy(rep, i);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(r.acceptance_rate > 0.0);
  CHECK(r.acceptance_rate <= 1.0);
}

TEST_CASE("one-step occupancy from a point mass recovers the kernel row") {
  // P(0, .) = (0.75, 0.25) for the two-to-one target under a flat proposal.
  // 20000 single-step replicates put the frequency within four binomial
  // standard deviations; the fixed seed makes the check deterministic.
  const Observable f({1.0, 0.0});
  SimConfig cfg;
  cfg.steps = 1;
  cfg.replicates = 20000;
  cfg.seed = 424242;
  cfg.initial = Distribution::point_mass(2, 0);
  const SimResult r = run_mh(two_to_one(), uniform_proposal(2), f, cfg);
  const double sigma = std::sqrt(0.25 * 0.75 / 20000.0);
  CHECK(std::abs(r.occupancy[1] - 0.25) <= 4.0 * sigma);
}

TEST_CASE("empirical mse against a hand-built result") {
  SimResult r;
  r.averages = {0.4, 0.5, 0.8};
  r.rng_streams = {0, 1, 2};
  const double ref = 0.5;
  const MseEstimate est = empirical_mse(r, ref);

  const std::vector<double> g = {0.01, 0.0, 0.09};
  double mean = (g[0] + g[1] + g[2]) / 3.0;
  CHECK(est.mse == doctest::Approx(mean).epsilon(1e-14));

  // Jackknife over leave-one-out means.
  std::vector<double> loo(3);
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int j = 0; j < 3; ++j)
      if (j != i) s += g[j];
    loo[i] = s / 2.0;
  }
  const double loo_mean = (loo[0] + loo[1] + loo[2]) / 3.0;
  double ss = 0.0;
  for (double v : loo) ss += (v - loo_mean) * (v - loo_mean);
  const double se = std::sqrt(ss * 2.0 / 3.0);
  CHECK(est.std_error == doctest::Approx(se).epsilon(1e-12));
}

TEST_CASE("empirical mse of a real run tracks the exact value") {
  // Convention bridge: the sampler averages the states after each of the t
  // transitions, so the matching exact computation starts one step in.
  const noisy::TargetSpec target = two_to_one();
  const TransitionKernel p = noisy::build_mh_kernel(target, uniform_proposal(2));
  const Observable f({1.0, 0.0});
  const Distribution mu = Distribution::point_mass(2, 0);
  const long t = 16;

  SimConfig cfg;
  cfg.steps = t;
  cfg.replicates = 4000;
  cfg.seed = 11;
  cfg.initial = mu;
  const SimResult r = run_mh(target, uniform_proposal(2), f, cfg);
  const MseEstimate est = empirical_mse(r, 2.0 / 3.0);
  const double exact = oracle::exact_mse(f, step(mu, p), p, t, 2.0 / 3.0);
  CHECK(std::abs(est.mse - exact) <= 6.0 * est.std_error);
}

TEST_CASE("configuration validation") {
  const Observable f({1.0, 0.0});
  SimConfig cfg;

  cfg.steps = 0;
  CHECK_THROWS_AS(run_mh(two_to_one(), uniform_proposal(2), f, cfg), InvalidInputError);
  cfg.steps = 5;
  cfg.replicates = 0;
  CHECK_THROWS_AS(run_mh(two_to_one(), uniform_proposal(2), f, cfg), InvalidInputError);
  cfg.replicates = 2;
  cfg.thinning = 0;
  CHECK_THROWS_AS(run_mh(two_to_one(), uniform_proposal(2), f, cfg), InvalidInputError);
  cfg.thinning = 1;
  cfg.burn_in = -1;
  CHECK_THROWS_AS(run_mh(two_to_one(), uniform_proposal(2), f, cfg), InvalidInputError);
  cfg.burn_in = 5;
  CHECK_THROWS_AS(run_mh(two_to_one(), uniform_proposal(2), f, cfg), InvalidInputError);
  cfg.burn_in = 0;
  cfg.initial = Distribution::uniform(3);
  CHECK_THROWS_AS(run_mh(two_to_one(), uniform_proposal(2), f, cfg), DimensionMismatchError);
  cfg.initial.reset();

  const SimResult single =
      run_mh(two_to_one(), uniform_proposal(2), f, SimConfig{1, 1, 0, {}, 1, 0});
  CHECK_THROWS_AS(empirical_mse(single, 0.5), InsufficientReplicatesError);
}
