#pragma once

#include <map>
#include <optional>
#include <string>

namespace mcperturb {
namespace bounds {

// Identifies which closed form produced a BoundResult.
enum class Formula {
  stationary_norm_coarse,   // alpha / (alpha - eps)
  stationary_norm_sharp,    // alpha / sqrt(alpha^2 - eps^2)
  stationary_gap_b0,        // eps / alpha
  stationary_gap_b1,        // (eps / (alpha - eps)) sqrt(2 alpha / eps - 1)
  stationary_gap_b2,        // eps / sqrt(alpha^2 - eps^2)
  finite_time_l2,           // (1 - (alpha - eps))^n dist + b2
  cesaro,                   // (1 - (1 - (alpha - eps))^t) / (t (alpha - eps)) dist + b2
  covariance_stationary,    // rate^lag star_f star_g
  covariance_nonstationary, // rate^s .. + 2^(3/2) rate^(t + s/2) .. - bias product
  covariance_sum,           // 2 star^2/(gap t) + 2^(7/2) dist ss^2/(gap^2 t^2) - bias^2
  mse_exact,                // 2 star^2/(alpha t) + 2^(7/2) dist ss^2/(alpha^2 t^2)
  mse_perturbed_form1,
  mse_perturbed_form2,
};

const char* formula_name(Formula id);

// One evaluated bound. When the epsilon < alpha gate fails the result is
// inapplicable and carries no value; that is a reportable state, not an
// error, because sweeps routinely cross the gate.
struct BoundResult {
  Formula id{};
  bool applicable = false;
  std::optional<double> value;
  std::map<std::string, double> inputs;

  double require() const;  // value or throws GapClosedError-style logic error
};

struct StationaryNormBounds {
  BoundResult coarse;
  BoundResult sharp;
};

// Bounds on the pi-weighted l2 norm of the perturbed stationary
// distribution. sharp <= coarse wherever both apply.
StationaryNormBounds stationary_norm_bounds(double alpha, double epsilon);

struct StationaryGapBounds {
  BoundResult b0;  // first-order heuristic eps/alpha
  BoundResult b1;  // needs epsilon > 0
  BoundResult b2;  // the sharp bound; b2 <= b1 wherever both apply
};

// Bounds on || pi - pi_eps ||_2.
StationaryGapBounds stationary_gap_bounds(double alpha, double epsilon);

// (1 - (alpha - eps))^n * dist_to_target + eps / sqrt(alpha^2 - eps^2),
// where dist_to_target is the distance from the start to the perturbed
// stationary distribution. Nonincreasing in n; at eps = 0 it is the plain
// contraction bound toward pi.
BoundResult finite_time_l2_bound(double alpha, double epsilon, long n, double dist_to_target);

// Error of the time-averaged law against pi after t steps:
// (1 - (1 - g)^t) / (t g) * dist + eps / sqrt(alpha^2 - eps^2) with
// g = alpha - eps. dist is measured to pi when eps = 0 and to the perturbed
// stationary distribution otherwise.
BoundResult cesaro_bound(double alpha, double epsilon, long t, double dist);

// rate^lag * star_f * star_g for a stationary chain with one-step contraction
// factor rate (1 - alpha, or 1 - (alpha - eps) with the norms taken under the
// perturbed stationary distribution).
BoundResult covariance_bound_stationary(double rate, long lag, double star_f, double star_g);

// Nonstationary covariance bound at times (t, t+s):
//   rate^s star_f star_g + 2^(3/2) rate^(t + s/2) dist_mu ss_f ss_g
//   - bias_f bias_g
// bias_f and bias_g are the signed mean errors of f at time t and g at time
// t+s. The result can be negative; it is returned signed.
BoundResult covariance_bound_nonstationary(double rate, long t, long s, double star_f,
                                           double star_g, double starstar_f, double starstar_g,
                                           double dist_mu, double bias_f, double bias_g);

// Bound on the doubly averaged covariance (1/t^2) sum_{m,n < t} Cov:
//   2 star_f^2 / (gap t) + 2^(7/2) dist_mu starstar_f^2 / (gap^2 t^2)
//   - cesaro_bias^2
// gap is alpha for the exact chain or alpha - eps for the perturbed one.
BoundResult covariance_sum_bound(double rate_gap, long t, double star_f, double starstar_f,
                                 double dist_mu, double cesaro_bias);

// Mean squared error of the ergodic average of f over t steps of the exact
// chain started at mu, against pi(f):
//   2 star_f^2 / (alpha t) + 2^(7/2) dist_mu starstar_f^2 / (alpha^2 t^2).
BoundResult mse_bound_exact(double alpha, long t, double star_f, double starstar_f,
                            double dist_mu);

struct PerturbedMseBounds {
  BoundResult form1;
  BoundResult form2;
  std::optional<double> best;  // min of the two when applicable
};

// Mean squared error of the ergodic average over the perturbed chain against
// pi(f). All norms are taken under the perturbed stationary distribution:
// star_eps_f and starstar_eps_f are the centered norms of f, dist_mu_eps the
// distance from the start. Both displayed forms are evaluated; neither
// dominates the other in general.
PerturbedMseBounds mse_bound_perturbed(double alpha, double epsilon, long t, double star_eps_f,
                                       double starstar_eps_f, double dist_mu_eps);

// Uniform dispatcher for batch evaluation: formula name plus named numeric
// inputs. Throws SpecParseError on unknown names or missing inputs.
BoundResult evaluate(const std::string& formula, const std::map<std::string, double>& inputs);

}  // namespace bounds
}  // namespace mcperturb
