#pragma once

#include <optional>

#include "mcperturb/chain.hpp"

namespace mcperturb {

// Norms in the geometry weighted by a positive reference distribution pi.
// For a signed measure nu:
//   l1 = sum |nu_i|          l2 = sqrt(sum nu_i^2 / pi_i)      tv = l1
// (tv is the unhalved total variation: 0 on equal probability measures, 2 on
// disjoint ones). For an observable h:
//   l1 = sum |h_i| pi_i      l2 = sqrt(sum h_i^2 pi_i)         tv = l1
//   l4 = (sum h_i^4 pi_i)^(1/4)
// and, when centering is requested, star / starstar are the l2 / l4 norms of
// h minus its pi-mean.
struct NormReport {
  double l1 = 0.0;
  double l2 = 0.0;
  double tv = 0.0;
  std::optional<double> l4;
  std::optional<double> star;
  std::optional<double> starstar;
};

NormReport weighted_norms(const SignedMeasure& nu, const Distribution& pi);
NormReport weighted_norms(const Observable& h, const Distribution& pi, bool center = false);

// Density with respect to pi, entrywise object_i / pi_i.
Observable radon_nikodym(const SignedMeasure& nu, const Distribution& pi);
Observable radon_nikodym(const Distribution& mu, const Distribution& pi);

// l2 distance between two probability measures in the pi-weighted geometry.
double l2_distance(const Distribution& a, const Distribution& b, const Distribution& pi);

// For a probability measure mu with finite pi-weighted l2 norm,
// ||mu - pi||_2^2 and ||mu||_2^2 - 1 coincide. Returns the absolute
// difference of the two sides as computed in floating point.
double norm_identity_check(const Distribution& mu, const Distribution& pi);

}  // namespace mcperturb
