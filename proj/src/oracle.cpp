#include "mcperturb/oracle.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "mcperturb/errors.hpp"
#include "mcperturb/linalg.hpp"

namespace mcperturb {
namespace oracle {

namespace {

void check_states(int n) {
  if (n > kMaxStates) {
    throw ResourceLimitError("oracle: state space " + std::to_string(n) + " exceeds cap " +
                             std::to_string(kMaxStates));
  }
}

void check_horizon(long t) {
  if (t < 0) throw InvalidInputError("oracle: horizon must be >= 0");
  if (t > kMaxHorizon) {
    throw ResourceLimitError("oracle: horizon " + std::to_string(t) + " exceeds cap " +
                             std::to_string(kMaxHorizon));
  }
}

}  // namespace

Distribution exact_pushforward(const Distribution& mu, const TransitionKernel& p, long t) {
  check_states(p.size());
  check_horizon(t);
  if (mu.size() != p.size()) {
    throw DimensionMismatchError("pushforward: sizes differ");
  }
  std::vector<double> v = mu.weights();
  for (long k = 0; k < t; ++k) v = left_apply(v, p.matrix());
  return Distribution(std::move(v));
}

double exact_covariance(const Observable& f, const Observable& g, const Distribution& mu,
                        const TransitionKernel& p, long t, long s) {
  check_states(p.size());
  check_horizon(t);
  if (s < 0) throw InvalidInputError("covariance: lag must be >= 0");
  check_horizon(t + s);
  if (f.size() != p.size() || g.size() != p.size() || mu.size() != p.size()) {
    throw DimensionMismatchError("covariance: sizes differ");
  }
  // E[f(X_t) g(X_{t+s})] = sum_y (mu P^t)_y f_y (P^s g)_y.
  std::vector<double> law_t = mu.weights();
  for (long k = 0; k < t; ++k) law_t = left_apply(law_t, p.matrix());
  std::vector<double> gs = g.values();
  for (long k = 0; k < s; ++k) gs = right_apply(p.matrix(), gs);

  double joint = 0.0;
  double mean_f = 0.0;
  for (int y = 0; y < p.size(); ++y) {
    joint += law_t[y] * f[y] * gs[y];
    mean_f += law_t[y] * f[y];
  }
  std::vector<double> law_ts = law_t;
  for (long k = 0; k < s; ++k) law_ts = left_apply(law_ts, p.matrix());
  double mean_g = 0.0;
  for (int y = 0; y < p.size(); ++y) mean_g += law_ts[y] * g[y];
  return joint - mean_f * mean_g;
}

double exact_covariance_double_sum(const Observable& f, const Distribution& mu,
                                   const TransitionKernel& p, long t) {
  check_states(p.size());
  if (t < 1) throw InvalidInputError("covariance double sum: t must be >= 1");
  check_horizon(t);
  if (f.size() != p.size() || mu.size() != p.size()) {
    throw DimensionMismatchError("covariance double sum: sizes differ");
  }
  const int n = p.size();
  // laws[m] = mu P^m, fs[s] = P^s f; Cov(m, m+s) then costs O(n).
  std::vector<std::vector<double>> laws(t);
  laws[0] = mu.weights();
  for (long m = 1; m < t; ++m) laws[m] = left_apply(laws[m - 1], p.matrix());
  std::vector<std::vector<double>> fs(t);
  fs[0] = f.values();
  for (long s = 1; s < t; ++s) fs[s] = right_apply(p.matrix(), fs[s - 1]);
  std::vector<double> means(t);
  for (long m = 0; m < t; ++m) means[m] = dot(laws[m], fs[0]);

  double total = 0.0;
  for (long m = 0; m < t; ++m) {
    for (long k = m; k < t; ++k) {
      const long s = k - m;
      double joint = 0.0;
      for (int y = 0; y < n; ++y) joint += laws[m][y] * fs[0][y] * fs[s][y];
      const double cov = joint - means[m] * means[k];
      total += (k == m) ? cov : 2.0 * cov;
    }
  }
  return total / (static_cast<double>(t) * static_cast<double>(t));
}

double exact_mse(const Observable& f, const Distribution& mu, const TransitionKernel& p, long t,
                 double reference_mean) {
  if (t < 1) throw InvalidInputError("mse: t must be >= 1");
  check_horizon(t);
  if (!std::isfinite(reference_mean)) {
    throw InvalidInputError("mse: reference mean must be finite");
  }
  double mean_of_average = 0.0;
  {
    std::vector<double> law = mu.weights();
    for (long m = 0; m < t; ++m) {
      if (m > 0) law = left_apply(law, p.matrix());
      mean_of_average += dot(law, f.values());
    }
    mean_of_average /= static_cast<double>(t);
  }
  const double bias = reference_mean - mean_of_average;
  return bias * bias + exact_covariance_double_sum(f, mu, p, t);
}

Distribution stationary_dense(const TransitionKernel& p) {
  check_states(p.size());
  if (!is_irreducible(p)) {
    throw ReducibleChainError("oracle: chain is reducible");
  }
  const int n = p.size();
  Matrix a(n, n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = p(j, i) - (i == j ? 1.0 : 0.0);
  for (int j = 0; j < n; ++j) a(n - 1, j) = 1.0;
  std::vector<double> b(n, 0.0);
  b[n - 1] = 1.0;
  std::vector<double> x = solve_linear(std::move(a), std::move(b));
  double total = 0.0;
  for (double& xi : x) {
    if (xi < 0.0 && xi > -1e-13) xi = 0.0;
    total += xi;
  }
  for (double& xi : x) xi /= total;
  return Distribution(std::move(x));
}

StationaryGapReport exact_stationary_gap(const TransitionKernel& p,
                                         const TransitionKernel& p_eps) {
  if (p.size() != p_eps.size()) {
    throw DimensionMismatchError("stationary gap: kernel sizes differ");
  }
  Distribution pi = stationary_dense(p);
  Distribution pi_eps = stationary_dense(p_eps);
  const NormReport norms = weighted_norms(SignedMeasure(pi, pi_eps), pi);
  return StationaryGapReport{std::move(pi), std::move(pi_eps), norms.l2, norms.l1, norms.tv};
}

double exact_cesaro_error(const Distribution& mu, const TransitionKernel& p,
                          const Distribution& reference, long t) {
  check_states(p.size());
  if (t < 1) throw InvalidInputError("cesaro error: t must be >= 1");
  check_horizon(t);
  if (mu.size() != p.size() || reference.size() != p.size()) {
    throw DimensionMismatchError("cesaro error: sizes differ");
  }
  const int n = p.size();
  std::vector<double> law = mu.weights();
  std::vector<double> avg(n, 0.0);
  for (long k = 0; k < t; ++k) {
    if (k > 0) law = left_apply(law, p.matrix());
    for (int i = 0; i < n; ++i) avg[i] += law[i];
  }
  std::vector<double> diff(n);
  for (int i = 0; i < n; ++i) diff[i] = reference[i] - avg[i] / static_cast<double>(t);
  return weighted_norms(SignedMeasure(std::move(diff)), reference).l2;
}

}  // namespace oracle
}  // namespace mcperturb
