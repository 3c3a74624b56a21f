#include "mcperturb/bounds.hpp"

#include <cmath>

#include "mcperturb/errors.hpp"

namespace mcperturb {
namespace bounds {

namespace {

void check_alpha(double alpha) {
  if (!std::isfinite(alpha) || alpha <= 0.0 || alpha > 1.0) {
    throw InvalidInputError("bound inputs: alpha must lie in (0, 1]");
  }
}

void check_epsilon(double epsilon) {
  if (!std::isfinite(epsilon) || epsilon < 0.0) {
    throw InvalidInputError("bound inputs: epsilon must be >= 0");
  }
}

void check_nonneg(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw InvalidInputError(std::string("bound inputs: ") + what + " must be >= 0");
  }
}

void check_signed(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidInputError(std::string("bound inputs: ") + what + " must be finite");
  }
}

void check_rate(double rate) {
  if (!std::isfinite(rate) || rate < 0.0 || rate >= 1.0) {
    throw InvalidInputError("bound inputs: rate must lie in [0, 1)");
  }
}

void check_count(long v, long least, const char* what) {
  if (v < least) {
    throw InvalidInputError(std::string("bound inputs: ") + what + " must be >= " +
                            std::to_string(least));
  }
}

double checked(double v) {
  if (!std::isfinite(v)) {
    throw InvalidInputError("bound evaluation overflowed");
  }
  return v;
}

// The asymptotic bias term eps / sqrt(alpha^2 - eps^2) shared by several
// formulas; callers have already enforced eps < alpha.
double bias_term(double alpha, double epsilon) {
  return epsilon / std::sqrt(alpha * alpha - epsilon * epsilon);
}

BoundResult gated(Formula id, bool applicable, double value,
                  std::map<std::string, double> inputs) {
  BoundResult r;
  r.id = id;
  r.applicable = applicable;
  r.inputs = std::move(inputs);
  if (applicable) r.value = checked(value);
  return r;
}

}  // namespace

const char* formula_name(Formula id) {
  switch (id) {
    case Formula::stationary_norm_coarse: return "stationary_norm_coarse";
    case Formula::stationary_norm_sharp: return "stationary_norm_sharp";
    case Formula::stationary_gap_b0: return "stationary_gap_b0";
    case Formula::stationary_gap_b1: return "stationary_gap_b1";
    case Formula::stationary_gap_b2: return "stationary_gap_b2";
    case Formula::finite_time_l2: return "finite_time_l2";
    case Formula::cesaro: return "cesaro";
    case Formula::covariance_stationary: return "covariance_stationary";
    case Formula::covariance_nonstationary: return "covariance_nonstationary";
    case Formula::covariance_sum: return "covariance_sum";
    case Formula::mse_exact: return "mse_exact";
    case Formula::mse_perturbed_form1: return "mse_perturbed_form1";
    case Formula::mse_perturbed_form2: return "mse_perturbed_form2";
  }
  return "unknown";
}

double BoundResult::require() const {
  if (!applicable || !value) {
    throw PreconditionError(std::string(formula_name(id)) +
                            ": not applicable (epsilon >= alpha)");
  }
  return *value;
}

StationaryNormBounds stationary_norm_bounds(double alpha, double epsilon) {
  check_alpha(alpha);
  check_epsilon(epsilon);
  const bool ok = epsilon < alpha;
  const std::map<std::string, double> in{{"alpha", alpha}, {"epsilon", epsilon}};
  StationaryNormBounds out;
  out.coarse = gated(Formula::stationary_norm_coarse, ok, ok ? alpha / (alpha - epsilon) : 0.0, in);
  out.sharp = gated(Formula::stationary_norm_sharp, ok,
                    ok ? alpha / std::sqrt(alpha * alpha - epsilon * epsilon) : 0.0, in);
  return out;
}

StationaryGapBounds stationary_gap_bounds(double alpha, double epsilon) {
  check_alpha(alpha);
  check_epsilon(epsilon);
  const bool ok = epsilon < alpha;
  const std::map<std::string, double> in{{"alpha", alpha}, {"epsilon", epsilon}};
  StationaryGapBounds out;
  out.b0 = gated(Formula::stationary_gap_b0, ok, ok ? epsilon / alpha : 0.0, in);
  const bool b1_ok = ok && epsilon > 0.0;
  out.b1 = gated(Formula::stationary_gap_b1, b1_ok,
                 b1_ok ? (epsilon / (alpha - epsilon)) * std::sqrt(2.0 * alpha / epsilon - 1.0)
                       : 0.0,
                 in);
  out.b2 = gated(Formula::stationary_gap_b2, ok, ok ? bias_term(alpha, epsilon) : 0.0, in);
  return out;
}

BoundResult finite_time_l2_bound(double alpha, double epsilon, long n, double dist_to_target) {
  check_alpha(alpha);
  check_epsilon(epsilon);
  check_count(n, 0, "n");
  check_nonneg(dist_to_target, "dist_to_target");
  const bool ok = epsilon < alpha;
  const double rate = 1.0 - (alpha - epsilon);
  const double value =
      ok ? std::pow(rate, static_cast<double>(n)) * dist_to_target + bias_term(alpha, epsilon)
         : 0.0;
  return gated(Formula::finite_time_l2, ok, value,
               {{"alpha", alpha},
                {"epsilon", epsilon},
                {"n", static_cast<double>(n)},
                {"dist_to_target", dist_to_target}});
}

BoundResult cesaro_bound(double alpha, double epsilon, long t, double dist) {
  check_alpha(alpha);
  check_epsilon(epsilon);
  check_count(t, 1, "t");
  check_nonneg(dist, "dist");
  const bool ok = epsilon < alpha;
  double value = 0.0;
  if (ok) {
    const double g = alpha - epsilon;
    value = (1.0 - std::pow(1.0 - g, static_cast<double>(t))) / (static_cast<double>(t) * g) *
                dist +
            bias_term(alpha, epsilon);
  }
  return gated(Formula::cesaro, ok, value,
               {{"alpha", alpha},
                {"epsilon", epsilon},
                {"t", static_cast<double>(t)},
                {"dist", dist}});
}

BoundResult covariance_bound_stationary(double rate, long lag, double star_f, double star_g) {
  check_rate(rate);
  check_count(lag, 0, "lag");
  check_nonneg(star_f, "star_f");
  check_nonneg(star_g, "star_g");
  const double value = std::pow(rate, static_cast<double>(lag)) * star_f * star_g;
  return gated(Formula::covariance_stationary, true, value,
               {{"rate", rate},
                {"lag", static_cast<double>(lag)},
                {"star_f", star_f},
                {"star_g", star_g}});
}

BoundResult covariance_bound_nonstationary(double rate, long t, long s, double star_f,
                                           double star_g, double starstar_f, double starstar_g,
                                           double dist_mu, double bias_f, double bias_g) {
  check_rate(rate);
  check_count(t, 0, "t");
  check_count(s, 0, "s");
  check_nonneg(star_f, "star_f");
  check_nonneg(star_g, "star_g");
  check_nonneg(starstar_f, "starstar_f");
  check_nonneg(starstar_g, "starstar_g");
  check_nonneg(dist_mu, "dist_mu");
  check_signed(bias_f, "bias_f");
  check_signed(bias_g, "bias_g");
  const double value =
      std::pow(rate, static_cast<double>(s)) * star_f * star_g +
      std::pow(2.0, 1.5) * std::pow(rate, static_cast<double>(t) + 0.5 * static_cast<double>(s)) *
          dist_mu * starstar_f * starstar_g -
      bias_f * bias_g;
  return gated(Formula::covariance_nonstationary, true, value,
               {{"rate", rate},
                {"t", static_cast<double>(t)},
                {"s", static_cast<double>(s)},
                {"star_f", star_f},
                {"star_g", star_g},
                {"starstar_f", starstar_f},
                {"starstar_g", starstar_g},
                {"dist_mu", dist_mu},
                {"bias_f", bias_f},
                {"bias_g", bias_g}});
}

BoundResult covariance_sum_bound(double rate_gap, long t, double star_f, double starstar_f,
                                 double dist_mu, double cesaro_bias) {
  if (!std::isfinite(rate_gap) || rate_gap <= 0.0 || rate_gap > 1.0) {
    throw InvalidInputError("bound inputs: rate_gap must lie in (0, 1]");
  }
  check_count(t, 1, "t");
  check_nonneg(star_f, "star_f");
  check_nonneg(starstar_f, "starstar_f");
  check_nonneg(dist_mu, "dist_mu");
  check_signed(cesaro_bias, "cesaro_bias");
  const double td = static_cast<double>(t);
  const double value = 2.0 * star_f * star_f / (rate_gap * td) +
                       std::pow(2.0, 3.5) * dist_mu * starstar_f * starstar_f /
                           (rate_gap * rate_gap * td * td) -
                       cesaro_bias * cesaro_bias;
  return gated(Formula::covariance_sum, true, value,
               {{"rate_gap", rate_gap},
                {"t", static_cast<double>(t)},
                {"star_f", star_f},
                {"starstar_f", starstar_f},
                {"dist_mu", dist_mu},
                {"cesaro_bias", cesaro_bias}});
}

BoundResult mse_bound_exact(double alpha, long t, double star_f, double starstar_f,
                            double dist_mu) {
  check_alpha(alpha);
  check_count(t, 1, "t");
  check_nonneg(star_f, "star_f");
  check_nonneg(starstar_f, "starstar_f");
  check_nonneg(dist_mu, "dist_mu");
  const double td = static_cast<double>(t);
  const double value =
      2.0 * star_f * star_f / (alpha * td) +
      std::pow(2.0, 3.5) * dist_mu * starstar_f * starstar_f / (alpha * alpha * td * td);
  return gated(Formula::mse_exact, true, value,
               {{"alpha", alpha},
                {"t", static_cast<double>(t)},
                {"star_f", star_f},
                {"starstar_f", starstar_f},
                {"dist_mu", dist_mu}});
}

PerturbedMseBounds mse_bound_perturbed(double alpha, double epsilon, long t, double star_eps_f,
                                       double starstar_eps_f, double dist_mu_eps) {
  check_alpha(alpha);
  check_epsilon(epsilon);
  check_count(t, 1, "t");
  check_nonneg(star_eps_f, "star_eps_f");
  check_nonneg(starstar_eps_f, "starstar_eps_f");
  check_nonneg(dist_mu_eps, "dist_mu_eps");
  const bool ok = epsilon < alpha;
  const std::map<std::string, double> in{{"alpha", alpha},
                                         {"epsilon", epsilon},
                                         {"t", static_cast<double>(t)},
                                         {"star_eps_f", star_eps_f},
                                         {"starstar_eps_f", starstar_eps_f},
                                         {"dist_mu_eps", dist_mu_eps}};
  PerturbedMseBounds out;
  double v1 = 0.0, v2 = 0.0;
  if (ok) {
    const double g = alpha - epsilon;
    const double td = static_cast<double>(t);
    const double star_sq = star_eps_f * star_eps_f;
    const double ss_sq = starstar_eps_f * starstar_eps_f;
    const double eps_sq_ratio = epsilon * epsilon / (alpha * alpha - epsilon * epsilon);
    v1 = star_sq * (eps_sq_ratio +
                    2.0 * (1.0 + bias_term(alpha, epsilon) * dist_mu_eps) / (g * td)) +
         std::pow(2.0, 3.5) * dist_mu_eps * ss_sq / (g * g * td * td);
    v2 = star_sq * (2.0 * eps_sq_ratio + 4.0 / (g * td)) +
         std::pow(2.0, 4.5) * dist_mu_eps * ss_sq / (g * g * td * td);
  }
  out.form1 = gated(Formula::mse_perturbed_form1, ok, v1, in);
  out.form2 = gated(Formula::mse_perturbed_form2, ok, v2, in);
  if (ok) out.best = std::min(v1, v2);
  return out;
}

namespace {

double need(const std::map<std::string, double>& inputs, const std::string& key) {
  const auto it = inputs.find(key);
  if (it == inputs.end()) {
    throw SpecParseError("bound evaluation: missing input '" + key + "'");
  }
  return it->second;
}

long need_count(const std::map<std::string, double>& inputs, const std::string& key) {
  const double v = need(inputs, key);
  const double r = std::round(v);
  if (!std::isfinite(v) || std::abs(v - r) > 1e-9) {
    throw SpecParseError("bound evaluation: input '" + key + "' must be an integer");
  }
  return static_cast<long>(r);
}

}  // namespace

BoundResult evaluate(const std::string& formula, const std::map<std::string, double>& in) {
  if (formula == "stationary_norm_coarse") {
    return stationary_norm_bounds(need(in, "alpha"), need(in, "epsilon")).coarse;
  }
  if (formula == "stationary_norm_sharp") {
    return stationary_norm_bounds(need(in, "alpha"), need(in, "epsilon")).sharp;
  }
  if (formula == "stationary_gap_b0") {
    return stationary_gap_bounds(need(in, "alpha"), need(in, "epsilon")).b0;
  }
  if (formula == "stationary_gap_b1") {
    return stationary_gap_bounds(need(in, "alpha"), need(in, "epsilon")).b1;
  }
  if (formula == "stationary_gap_b2") {
    return stationary_gap_bounds(need(in, "alpha"), need(in, "epsilon")).b2;
  }
  if (formula == "finite_time_l2") {
    return finite_time_l2_bound(need(in, "alpha"), need(in, "epsilon"), need_count(in, "n"),
                                need(in, "dist_to_target"));
  }
  if (formula == "cesaro") {
    return cesaro_bound(need(in, "alpha"), need(in, "epsilon"), need_count(in, "t"),
                        need(in, "dist"));
  }
  if (formula == "covariance_stationary") {
    return covariance_bound_stationary(need(in, "rate"), need_count(in, "lag"),
                                       need(in, "star_f"), need(in, "star_g"));
  }
  if (formula == "covariance_nonstationary") {
    return covariance_bound_nonstationary(need(in, "rate"), need_count(in, "t"),
                                          need_count(in, "s"), need(in, "star_f"),
                                          need(in, "star_g"), need(in, "starstar_f"),
                                          need(in, "starstar_g"), need(in, "dist_mu"),
                                          need(in, "bias_f"), need(in, "bias_g"));
  }
  if (formula == "covariance_sum") {
    return covariance_sum_bound(need(in, "rate_gap"), need_count(in, "t"), need(in, "star_f"),
                                need(in, "starstar_f"), need(in, "dist_mu"),
                                need(in, "cesaro_bias"));
  }
  if (formula == "mse_exact") {
    return mse_bound_exact(need(in, "alpha"), need_count(in, "t"), need(in, "star_f"),
                           need(in, "starstar_f"), need(in, "dist_mu"));
  }
  if (formula == "mse_perturbed_form1") {
    return mse_bound_perturbed(need(in, "alpha"), need(in, "epsilon"), need_count(in, "t"),
                               need(in, "star_eps_f"), need(in, "starstar_eps_f"),
                               need(in, "dist_mu_eps"))
        .form1;
  }
  if (formula == "mse_perturbed_form2") {
    return mse_bound_perturbed(need(in, "alpha"), need(in, "epsilon"), need_count(in, "t"),
                               need(in, "star_eps_f"), need(in, "starstar_eps_f"),
                               need(in, "dist_mu_eps"))
        .form2;
  }
  throw SpecParseError("bound evaluation: unknown formula '" + formula + "'");
}

}  // namespace bounds
}  // namespace mcperturb
