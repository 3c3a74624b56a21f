#pragma once

#include "mcperturb/chain.hpp"
#include "mcperturb/norms.hpp"

namespace mcperturb {
namespace oracle {

// Hard caps keeping every dense computation in seconds. Callers may lower
// them through the CLI but never raise them.
inline constexpr int kMaxStates = 200;
inline constexpr long kMaxHorizon = 512;

// mu P^t by repeated vector-matrix products.
Distribution exact_pushforward(const Distribution& mu, const TransitionKernel& p, long t);

// Cov[f(X_t), g(X_{t+s})] for the chain started at mu, by exact pushforward
// and kernel powers applied to g.
double exact_covariance(const Observable& f, const Observable& g, const Distribution& mu,
                        const TransitionKernel& p, long t, long s);

// (1/t^2) sum_{m,n < t} Cov[f(X_m), f(X_n)], exactly.
double exact_covariance_double_sum(const Observable& f, const Distribution& mu,
                                   const TransitionKernel& p, long t);

// E[(reference_mean - (1/t) sum_{k<t} f(X_k))^2] for the chain started at mu:
// squared bias plus the doubly averaged covariance.
double exact_mse(const Observable& f, const Distribution& mu, const TransitionKernel& p, long t,
                 double reference_mean);

struct StationaryGapReport {
  Distribution pi;
  Distribution pi_eps;
  double l2 = 0.0;  // all norms of pi - pi_eps, weighted by pi
  double l1 = 0.0;
  double tv = 0.0;
};

// Stationary distributions of both kernels by direct dense solve of the
// balance equations, and the norms of their difference.
StationaryGapReport exact_stationary_gap(const TransitionKernel& p,
                                         const TransitionKernel& p_eps);

// || reference - (1/t) sum_{k<t} mu P^k ||_2, weighted by reference.
double exact_cesaro_error(const Distribution& mu, const TransitionKernel& p,
                          const Distribution& reference, long t);

// Stationary distribution by dense solve alone (no power iteration); the
// oracle-side answer that stationary_distribution is checked against.
Distribution stationary_dense(const TransitionKernel& p);

}  // namespace oracle
}  // namespace mcperturb
