// Acceptance gate: one timed pass/fail line per criterion, nonzero exit if
// any fails. Every random draw goes through fixed-seed streams, so the run is
// deterministic end to end.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mcperturb/bounds.hpp"
#include "mcperturb/chain.hpp"
#include "mcperturb/cli.hpp"
#include "mcperturb/errors.hpp"
#include "mcperturb/linalg.hpp"
#include "mcperturb/noisy_mh.hpp"
#include "mcperturb/norms.hpp"
#include "mcperturb/oracle.hpp"
#include "mcperturb/rng.hpp"
#include "mcperturb/sim.hpp"
#include "mcperturb/spectral.hpp"
#include "test_support.hpp"

#ifndef MCPERTURB_DATA_DIR
#define MCPERTURB_DATA_DIR "data"
#endif

namespace {

using namespace mcperturb;
using mcperturb::testing::ChainPair;

int draw_size(RngStream& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
}

// ---------------------------------------------------------------- criterion 1

bool norm_identity(std::string& detail) {
  RngStream rng(101);
  double worst = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = draw_size(rng, 2, 50);
    const Distribution pi = testing::random_distribution(rng, n);
    const Distribution mu = testing::random_distribution(rng, n);
    worst = std::max(worst, norm_identity_check(mu, pi));
  }
  std::ostringstream os;
  os << "worst residual " << worst << " over 1000 pairs, n up to 50";
  detail = os.str();
  return worst <= 1e-10;
}

// ---------------------------------------------------------------- criterion 2

bool contraction(std::string& detail) {
  RngStream rng(202);
  double worst_excess = -1.0;
  for (int rep = 0; rep < 200; ++rep) {
    const int n = draw_size(rng, 2, 20);
    const testing::RandomChain chain = testing::random_reversible_chain(rng, n);
    const Distribution mu = testing::random_distribution(rng, n);
    const double d0 = l2_distance(mu, chain.pi, chain.pi);
    Distribution law = mu;
    for (int steps = 1; steps <= 64; ++steps) {
      law = step(law, chain.kernel);
      const double lhs = l2_distance(law, chain.pi, chain.pi);
      const double rhs = std::pow(1.0 - chain.alpha, steps) * d0;
      worst_excess = std::max(worst_excess, lhs - rhs);
    }
  }
  std::ostringstream os;
  os << "worst bound excess " << worst_excess << " over 200 chains, 64 steps each";
  detail = os.str();
  return worst_excess <= 1e-9;
}

// ------------------------------------------------------------ criteria 3 and 4

bool stationary_gap_domination(std::vector<ChainPair>& pairs, std::string& detail) {
  RngStream rng(303);
  pairs.clear();
  pairs.reserve(200);
  while (pairs.size() < 200) {
    const int n = draw_size(rng, 2, 12);
    pairs.push_back(testing::random_perturbed_pair(rng, n, 0.9));
  }
  double worst_excess = -1.0;
  for (const ChainPair& pair : pairs) {
    const double oracle_gap = l2_distance(pair.pi, pair.pi_eps, pair.pi);
    const bounds::StationaryGapBounds gb =
        bounds::stationary_gap_bounds(pair.alpha, pair.epsilon);
    if (!gb.b2.applicable) {
      detail = "sharp gap bound unexpectedly gated out";
      return false;
    }
    worst_excess = std::max(worst_excess, oracle_gap - *gb.b2.value);
    const bounds::StationaryNormBounds nb =
        bounds::stationary_norm_bounds(pair.alpha, pair.epsilon);
    if (*nb.sharp.value > *nb.coarse.value + 1e-15) {
      detail = "sharp stationary-norm bound exceeded the coarse one";
      return false;
    }
  }
  std::ostringstream os;
  os << "worst oracle-minus-bound " << worst_excess << " over 200 pairs";
  detail = os.str();
  return worst_excess <= 1e-9;
}

bool perturbed_contraction(const std::vector<ChainPair>& pairs, std::string& detail) {
  if (pairs.empty()) {
    detail = "no perturbed pairs available (criterion 3 generation failed)";
    return false;
  }
  RngStream rng(404);
  double worst_contraction = -1.0;
  double worst_finite_time = -1.0;
  for (const ChainPair& pair : pairs) {
    const Distribution mu = testing::random_distribution(rng, pair.p.size());
    const double d0 = l2_distance(mu, pair.pi_eps, pair.pi);
    const double rate = 1.0 - (pair.alpha - pair.epsilon);
    Distribution law = mu;
    for (int steps = 1; steps <= 64; ++steps) {
      law = step(law, pair.p_eps);
      const double toward_pieps = l2_distance(law, pair.pi_eps, pair.pi);
      worst_contraction =
          std::max(worst_contraction, toward_pieps - std::pow(rate, steps) * d0);
      const bounds::BoundResult ft =
          bounds::finite_time_l2_bound(pair.alpha, pair.epsilon, steps, d0);
      const double toward_pi = l2_distance(law, pair.pi, pair.pi);
      worst_finite_time = std::max(worst_finite_time, toward_pi - *ft.value);
    }
  }
  std::ostringstream os;
  os << "worst excess: contraction " << worst_contraction << ", finite-time "
     << worst_finite_time;
  detail = os.str();
  return worst_contraction <= 1e-9 && worst_finite_time <= 1e-9;
}

// ---------------------------------------------------------------- criterion 5

bool gap_bound_asymptotics(std::string& detail) {
  for (double alpha : {0.05, 0.2, 0.5, 0.9}) {
    {
      const double eps = 1e-4 * alpha;
      const bounds::StationaryGapBounds gb = bounds::stationary_gap_bounds(alpha, eps);
      const double ratio = *gb.b2.value / *gb.b0.value;
      if (ratio < 1.0 || ratio > 1.001) {
        std::ostringstream os;
        os << "b2/b0 = " << ratio << " at alpha " << alpha;
        detail = os.str();
        return false;
      }
    }
    {
      const double eps = 1e-6 * alpha;
      const bounds::StationaryGapBounds gb = bounds::stationary_gap_bounds(alpha, eps);
      const double normalized =
          *gb.b1.value / *gb.b0.value * std::sqrt(eps / (2.0 * alpha));
      if (normalized < 0.99 || normalized > 1.01) {
        std::ostringstream os;
        os << "normalized b1/b0 = " << normalized << " at alpha " << alpha;
        detail = os.str();
        return false;
      }
    }
  }
  detail = "both ratio laws hold at alpha in {0.05, 0.2, 0.5, 0.9}";
  return true;
}

// ---------------------------------------------------------------- criterion 6

struct PerturbedGeometry {
  ChainPair pair;
  double eps_both = 0.0;  // operator norm under both stationary geometries
};

PerturbedGeometry reversible_pair_with_margin(RngStream& rng, int n, double frac) {
  for (;;) {
    ChainPair pair = testing::random_perturbed_pair(rng, n, frac);
    const double eps_eps =
        spectral::operator_norm(pair.p_eps.matrix() - pair.p.matrix(), pair.pi_eps).full_norm;
    const double eps_both = std::max(pair.epsilon, eps_eps);
    if (eps_both < pair.alpha) return {std::move(pair), eps_both};
  }
}

bool covariance_and_mse_domination(std::string& detail) {
  RngStream rng(606);
  double worst = -1.0;
  const char* worst_kind = "none";
  const auto note = [&](const char* kind, double excess) {
    if (excess > worst) {
      worst = excess;
      worst_kind = kind;
    }
  };

  for (int rep = 0; rep < 50; ++rep) {
    const int n = draw_size(rng, 2, 10);
    const PerturbedGeometry geom = reversible_pair_with_margin(rng, n, 0.45);
    const ChainPair& pair = geom.pair;
    const Observable f = testing::random_observable(rng, n);
    const Observable g = testing::random_observable(rng, n);
    const Distribution mu = testing::random_distribution(rng, n);

    const NormReport nf = weighted_norms(f, pair.pi, true);
    const NormReport ng = weighted_norms(g, pair.pi, true);
    const NormReport nef = weighted_norms(f, pair.pi_eps, true);
    const NormReport neg = weighted_norms(g, pair.pi_eps, true);
    const double mean_f = expectation(pair.pi, f);
    const double mean_g = expectation(pair.pi, g);
    const double mean_eps_f = expectation(pair.pi_eps, f);
    const double dist_mu_pi = l2_distance(mu, pair.pi, pair.pi);
    const double dist_mu_eps = l2_distance(mu, pair.pi_eps, pair.pi_eps);
    const double rate = 1.0 - pair.alpha;
    const double rate_eps = 1.0 - (pair.alpha - geom.eps_both);

    // Stationary covariance bounds, exact and perturbed chains.
    for (long s = 0; s <= 32; ++s) {
      const double cov = oracle::exact_covariance(f, g, pair.pi, pair.p, 0, s);
      const bounds::BoundResult b =
          bounds::covariance_bound_stationary(rate, s, *nf.star, *ng.star);
      note("stationary covariance", std::abs(cov) - *b.value);

      const double cov_eps = oracle::exact_covariance(f, g, pair.pi_eps, pair.p_eps, 0, s);
      const bounds::BoundResult be =
          bounds::covariance_bound_stationary(rate_eps, s, *nef.star, *neg.star);
      note("perturbed stationary covariance", std::abs(cov_eps) - *be.value);
    }

    // Laws and per-step means feed the signed nonstationary bound.
    std::vector<Distribution> laws{mu};
    std::vector<Distribution> laws_eps{mu};
    for (int k = 0; k < 64; ++k) {
      laws.push_back(step(laws.back(), pair.p));
      laws_eps.push_back(step(laws_eps.back(), pair.p_eps));
    }
    for (long t = 0; t <= 32; ++t) {
      for (long s = 0; t + s <= 32; ++s) {
        const double cov = oracle::exact_covariance(f, g, mu, pair.p, t, s);
        const double bias_f =
            expectation(laws[static_cast<std::size_t>(t)], f) - mean_f;
        const double bias_g =
            expectation(laws[static_cast<std::size_t>(t + s)], g) - mean_g;
        const bounds::BoundResult b = bounds::covariance_bound_nonstationary(
            rate, t, s, *nf.star, *ng.star, *nf.starstar, *ng.starstar, dist_mu_pi, bias_f,
            bias_g);
        note("nonstationary covariance", cov - *b.value);
      }
    }

    // Doubly averaged covariance and mean squared error over the horizon.
    double bias_sum = 0.0;
    double bias_sum_eps = 0.0;
    for (long t = 1; t <= 64; ++t) {
      bias_sum += expectation(laws[static_cast<std::size_t>(t - 1)], f) - mean_f;
      bias_sum_eps += expectation(laws_eps[static_cast<std::size_t>(t - 1)], f) - mean_eps_f;
      const double cesaro_bias = bias_sum / static_cast<double>(t);
      const double cesaro_bias_eps = bias_sum_eps / static_cast<double>(t);

      const bounds::BoundResult cs = bounds::covariance_sum_bound(
          pair.alpha, t, *nf.star, *nf.starstar, dist_mu_pi, cesaro_bias);
      note("covariance double sum",
           oracle::exact_covariance_double_sum(f, mu, pair.p, t) - *cs.value);

      const bounds::BoundResult me =
          bounds::mse_bound_exact(pair.alpha, t, *nf.star, *nf.starstar, dist_mu_pi);
      note("exact mse", oracle::exact_mse(f, mu, pair.p, t, mean_f) - *me.value);

      const bounds::BoundResult cse = bounds::covariance_sum_bound(
          pair.alpha - geom.eps_both, t, *nef.star, *nef.starstar, dist_mu_eps,
          cesaro_bias_eps);
      note("perturbed covariance double sum",
           oracle::exact_covariance_double_sum(f, mu, pair.p_eps, t) - *cse.value);

      const bounds::PerturbedMseBounds pm = bounds::mse_bound_perturbed(
          pair.alpha, geom.eps_both, t, *nef.star, *nef.starstar, dist_mu_eps);
      note("perturbed mse", oracle::exact_mse(f, mu, pair.p_eps, t, mean_f) - *pm.best);
    }
  }
  std::ostringstream os;
  os << "worst excess " << worst << " (" << worst_kind << ") over 50 instances";
  detail = os.str();
  return worst <= 1e-9;
}

// ---------------------------------------------------------------- criterion 7

bool noisy_decomposition(std::string& detail) {
  RngStream rng(707);
  double worst_residual = 0.0;
  double worst_operator = -1.0;
  double worst_domination = -1.0;
  int applicable = 0;
  for (int rep = 0; rep < 100; ++rep) {
    const int n = draw_size(rng, 2, 8);
    const testing::NoisyInstance inst = testing::random_noisy_instance(rng, n, 0.08);
    const noisy::NoisyAnalysis an = analyze_noise(inst.target, inst.proposal, inst.noise);
    worst_residual = std::max(worst_residual, an.decomposition_residual);

    const Distribution pi = inst.target.normalized();
    const noisy::NoisyOperatorBound ob = noisy::noisy_operator_bound(an, pi);
    worst_operator = std::max(worst_operator, ob.epsilon_actual - ob.epsilon_bound);

    const double alpha = spectral::spectral_gap(an.p, pi).alpha;
    if (ob.epsilon_bound >= alpha) continue;
    ++applicable;
    const Distribution pi_hat = oracle::stationary_dense(an.p_hat);
    const Distribution mu = Distribution::uniform(n);
    const double dist_mu = l2_distance(mu, pi_hat, pi);
    for (long t : {1L, 4L, 16L, 64L}) {
      const noisy::NoisyErrorBound eb = noisy::noisy_error_bound(alpha, an, pi, t, dist_mu);
      const double oracle_err = oracle::exact_cesaro_error(mu, an.p_hat, pi, t);
      worst_domination = std::max(worst_domination, oracle_err - *eb.bound.value);
    }
  }
  std::ostringstream os;
  os << "residual " << worst_residual << ", operator excess " << worst_operator
     << ", domination excess " << worst_domination << ", applicable " << applicable << "/100";
  detail = os.str();
  return worst_residual <= 1e-12 && worst_operator <= 1e-9 && worst_domination <= 1e-9 &&
         applicable >= 25;
}

// ---------------------------------------------------------------- criterion 8

bool simulation_consistency(std::string& detail) {
  const noisy::TargetSpec target({2.0, 1.0});
  const noisy::ProposalSpec proposal(TransitionKernel(Matrix(2, 2, 0.5)));
  const TransitionKernel p = noisy::build_mh_kernel(target, proposal);
  const Observable f({1.0, 0.0});
  const Distribution mu = Distribution::uniform(2);
  const double ref = 2.0 / 3.0;

  double worst_z = 0.0;
  for (long t : {4L, 16L, 64L}) {
    sim::SimConfig cfg;
    cfg.steps = t;
    cfg.replicates = 100000;
    cfg.seed = 8800 + static_cast<std::uint64_t>(t);
    cfg.initial = mu;
    const sim::SimResult run = sim::run_mh(target, proposal, f, cfg);
    const sim::MseEstimate est = sim::empirical_mse(run, ref);
    // The sampler averages the states reached after each transition, so the
    // matching exact average starts one step in.
    const double exact = oracle::exact_mse(f, step(mu, p), p, t, ref);
    worst_z = std::max(worst_z, std::abs(est.mse - exact) / est.std_error);
  }

  // One-step transition frequencies against the noisy kernel row: a flat
  // target with symmetric ten percent noise accepts with probability 0.95.
  const noisy::TargetSpec flat({1.0, 1.0});
  const noisy::ProposalSpec flat_proposal(TransitionKernel(Matrix(2, 2, 0.5)));
  const noisy::NoiseModel noise = noisy::NoiseModel::broadcast(
      noisy::NoiseRule::multiplicative,
      {noisy::NoiseAtom{-0.1, 0.5}, noisy::NoiseAtom{0.1, 0.5}}, 2);
  const TransitionKernel p_hat = noisy::build_noisy_mh_kernel(flat, flat_proposal, noise);

  double worst_freq_z = 0.0;
  for (int start = 0; start < 2; ++start) {
    sim::SimConfig cfg;
    cfg.steps = 1;
    cfg.replicates = 100000;
    cfg.seed = 9900 + static_cast<std::uint64_t>(start);
    cfg.initial = Distribution::point_mass(2, start);
    const sim::SimResult run = sim::run_noisy_mh(flat, flat_proposal, noise, f, cfg);
    for (int y = 0; y < 2; ++y) {
      const double expected = p_hat(start, y);
      const double sigma = std::sqrt(expected * (1.0 - expected) / 100000.0);
      worst_freq_z = std::max(
          worst_freq_z, std::abs(run.occupancy[static_cast<std::size_t>(y)] - expected) / sigma);
    }
  }
  std::ostringstream os;
  os << "worst mse z " << worst_z << " (limit 3), worst frequency z " << worst_freq_z
     << " (limit 3)";
  detail = os.str();
  return worst_z <= 3.0 && worst_freq_z <= 3.0;
}

// ---------------------------------------------------------------- criterion 9

bool verify_determinism(std::string& detail) {
  const std::string spec_path = std::string(MCPERTURB_DATA_DIR) + "/chain_pair.json";
  const auto out_a =
      std::filesystem::temp_directory_path() / "mcperturb_acceptance_verify_a.csv";
  const auto out_b =
      std::filesystem::temp_directory_path() / "mcperturb_acceptance_verify_b.csv";

  cli::RunManifest manifest;
  manifest.input_path = spec_path;
  manifest.out_path = out_a.string();
  const int code_a = cli::run("verify", manifest);
  manifest.out_path = out_b.string();
  const int code_b = cli::run("verify", manifest);
  if (code_a != cli::kExitOk || code_b != cli::kExitOk) {
    detail = "verify exited " + std::to_string(code_a) + " / " + std::to_string(code_b) +
             " on " + spec_path;
    return false;
  }
  const auto read_all = [](const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
  };
  const std::string a = read_all(out_a);
  const std::string b = read_all(out_b);
  std::ostringstream os;
  os << a.size() << " bytes, reruns " << (a == b ? "identical" : "DIFFER");
  detail = os.str();
  return !a.empty() && a == b;
}

struct Criterion {
  int id;
  const char* name;
  double time_limit_seconds;
  std::function<bool(std::string&)> body;
};

}  // namespace

int main() {
  std::vector<ChainPair> pairs;
  const std::vector<Criterion> criteria = {
      {1, "norm identity", 1.0, norm_identity},
      {2, "contraction", 10.0, contraction},
      {3, "stationary-gap domination", 30.0,
       [&pairs](std::string& d) { return stationary_gap_domination(pairs, d); }},
      {4, "perturbed contraction", 30.0,
       [&pairs](std::string& d) { return perturbed_contraction(pairs, d); }},
      {5, "gap-bound asymptotics", 1.0, gap_bound_asymptotics},
      {6, "covariance and mse domination", 120.0, covariance_and_mse_domination},
      {7, "noisy decomposition", 30.0, noisy_decomposition},
      {8, "simulation consistency", 120.0, simulation_consistency},
      {9, "verify determinism", 30.0, verify_determinism},
  };

  bool all_ok = true;
  for (const Criterion& c : criteria) {
    std::string det;
    bool ok = false;
    const auto begin = std::chrono::steady_clock::now();
    try {
      ok = c.body(det);
    } catch (const std::exception& e) {
      ok = false;
      det = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
    if (seconds > c.time_limit_seconds) {
      ok = false;
      det += " [over time limit]";
    }
    char stamp[32];
    std::snprintf(stamp, sizeof stamp, "%.2fs", seconds);
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.name << " ("
              << stamp << ")";
    if (!det.empty()) std::cout << " -- " << det;
    std::cout << '\n';
    all_ok = all_ok && ok;
  }
  std::cout << (all_ok ? "all criteria passed" : "ACCEPTANCE FAILED") << '\n';
  return all_ok ? 0 : 1;
}
