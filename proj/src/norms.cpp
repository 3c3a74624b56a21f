#include "mcperturb/norms.hpp"

#include <cmath>
#include <string>

#include "mcperturb/errors.hpp"

namespace mcperturb {

namespace {

void require_positive_reference(const Distribution& pi) {
  for (int i = 0; i < pi.size(); ++i) {
    if (pi[i] <= 0.0) {
      throw ZeroMassStateError("reference distribution vanishes at state " + std::to_string(i));
    }
  }
}

void require_same_size(int a, int b, const char* what) {
  if (a != b) {
    throw DimensionMismatchError(std::string(what) + ": sizes differ");
  }
}

}  // namespace

NormReport weighted_norms(const SignedMeasure& nu, const Distribution& pi) {
  require_same_size(nu.size(), pi.size(), "measure norms");
  require_positive_reference(pi);
  NormReport out;
  double sq = 0.0;
  for (int i = 0; i < nu.size(); ++i) {
    out.l1 += std::abs(nu[i]);
    sq += nu[i] * nu[i] / pi[i];
  }
  out.l2 = std::sqrt(sq);
  out.tv = out.l1;
  return out;
}

NormReport weighted_norms(const Observable& h, const Distribution& pi, bool center) {
  require_same_size(h.size(), pi.size(), "observable norms");
  require_positive_reference(pi);
  NormReport out;
  double mean = 0.0;
  for (int i = 0; i < h.size(); ++i) mean += h[i] * pi[i];
  double m2 = 0.0, m4 = 0.0, c2 = 0.0, c4 = 0.0;
  for (int i = 0; i < h.size(); ++i) {
    const double v = h[i];
    out.l1 += std::abs(v) * pi[i];
    m2 += v * v * pi[i];
    m4 += v * v * v * v * pi[i];
    if (center) {
      const double d = v - mean;
      c2 += d * d * pi[i];
      c4 += d * d * d * d * pi[i];
    }
  }
  out.l2 = std::sqrt(m2);
  out.tv = out.l1;
  out.l4 = std::pow(m4, 0.25);
  if (center) {
    out.star = std::sqrt(c2);
    out.starstar = std::pow(c4, 0.25);
  }
  return out;
}

Observable radon_nikodym(const SignedMeasure& nu, const Distribution& pi) {
  require_same_size(nu.size(), pi.size(), "density");
  require_positive_reference(pi);
  std::vector<double> density(nu.size());
  for (int i = 0; i < nu.size(); ++i) density[i] = nu[i] / pi[i];
  return Observable(std::move(density));
}

Observable radon_nikodym(const Distribution& mu, const Distribution& pi) {
  return radon_nikodym(SignedMeasure(mu.weights()), pi);
}

double l2_distance(const Distribution& a, const Distribution& b, const Distribution& pi) {
  return weighted_norms(SignedMeasure(a, b), pi).l2;
}

double norm_identity_check(const Distribution& mu, const Distribution& pi) {
  require_same_size(mu.size(), pi.size(), "norm identity");
  require_positive_reference(pi);
  double dist_sq = 0.0;
  double norm_sq = 0.0;
  for (int i = 0; i < mu.size(); ++i) {
    const double d = mu[i] - pi[i];
    dist_sq += d * d / pi[i];
    norm_sq += mu[i] * mu[i] / pi[i];
  }
  return std::abs(dist_sq - (norm_sq - 1.0));
}

}  // namespace mcperturb
