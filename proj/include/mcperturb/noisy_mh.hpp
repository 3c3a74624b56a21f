#pragma once

#include <optional>
#include <vector>

#include "mcperturb/bounds.hpp"
#include "mcperturb/chain.hpp"
#include "mcperturb/linalg.hpp"

namespace mcperturb {
namespace noisy {

// Target known only up to normalization, as the acceptance ratio uses it.
class TargetSpec {
 public:
  explicit TargetSpec(std::vector<double> unnormalized_weights);

  int size() const { return static_cast<int>(weights_.size()); }
  double weight(int i) const { return weights_[i]; }
  Distribution normalized() const;

 private:
  std::vector<double> weights_;
};

// Proposal kernel with the support symmetry q(y|x) > 0 iff q(x|y) > 0, which
// keeps every evaluated acceptance ratio finite and positive.
class ProposalSpec {
 public:
  explicit ProposalSpec(TransitionKernel q);

  int size() const { return kernel_.size(); }
  double operator()(int x, int y) const { return kernel_(x, y); }
  const TransitionKernel& kernel() const { return kernel_; }

 private:
  TransitionKernel kernel_;
};

enum class NoiseRule { multiplicative, additive, lognormal };

const char* rule_name(NoiseRule rule);
NoiseRule rule_from_name(const std::string& name);

// How a noise draw z distorts the true acceptance ratio. All rules keep the
// distorted ratio nonnegative.
double distorted_ratio(NoiseRule rule, double alpha, double z);

struct NoiseAtom {
  double z = 0.0;
  double prob = 0.0;
};

// Finite noise distribution per proposed state: when state y is proposed, z
// is drawn from atoms_for(y) and the acceptance ratio passes through the
// distortion rule.
class NoiseModel {
 public:
  NoiseModel(NoiseRule rule, std::vector<std::vector<NoiseAtom>> per_state_atoms);

  static NoiseModel broadcast(NoiseRule rule, std::vector<NoiseAtom> atoms, int n);
  static NoiseModel noiseless(int n);

  int size() const { return static_cast<int>(atoms_.size()); }
  NoiseRule rule() const { return rule_; }
  const std::vector<NoiseAtom>& atoms_for(int y) const { return atoms_[y]; }

  // E_z min(1, distorted ratio) when proposing y with true ratio alpha.
  double expected_clipped(double alpha, int y) const;
  // E_z |alpha - distorted ratio| (unclipped), the delta field integrand.
  double expected_absolute_error(double alpha, int y) const;
  // E_z (min(1, alpha) - min(1, distorted ratio)), the signed delta-prime.
  double expected_signed_error(double alpha, int y) const;

  // Same rule with every z scaled by c.
  NoiseModel scaled(double c) const;

 private:
  NoiseRule rule_;
  std::vector<std::vector<NoiseAtom>> atoms_;
};

// True acceptance ratio alpha(y|x); zero when y is never proposed from x.
double acceptance_ratio(const TargetSpec& target, const ProposalSpec& proposal, int x, int y);

// Exact Metropolis-Hastings kernel: off-diagonal q(y|x) min(1, alpha(y|x)),
// diagonal absorbing the rejected mass. Reversible with respect to the
// normalized target by construction (verified).
TransitionKernel build_mh_kernel(const TargetSpec& target, const ProposalSpec& proposal);

// Noisy variant: the acceptance probability is the exact expectation of
// min(1, distorted ratio) over the finite noise support. No sampling.
TransitionKernel build_noisy_mh_kernel(const TargetSpec& target, const ProposalSpec& proposal,
                                       const NoiseModel& noise);

// The full error-field analysis of one noisy sampler:
//   delta(x,y)       expected absolute ratio error, per proposable pair
//   delta_prime(x,y) expected signed clipped error
//   gamma, gamma_prime  their proposal-weighted row averages
//   z_prime(x,y) = q(y|x) delta_prime(x,y), gamma_prime as a diagonal
//   operator; these two satisfy P - P_hat = Z' - Gamma' exactly, and
//   decomposition_residual records the worst entry of the difference.
struct NoisyAnalysis {
  TransitionKernel p;
  TransitionKernel p_hat;
  TransitionKernel proposal;
  Matrix delta;
  Matrix delta_prime;
  std::vector<double> gamma;
  std::vector<double> gamma_prime;
  Matrix z_prime;
  double delta_sup = 0.0;
  double decomposition_residual = 0.0;
  // Whether P_hat happens to be reversible for its own stationary law; not
  // required by any bound, recorded for diagnostics. Unset when P_hat is
  // reducible.
  std::optional<bool> p_hat_reversible;
  double p_hat_reversibility_violation = 0.0;
};

NoisyAnalysis analyze_noise(const TargetSpec& target, const ProposalSpec& proposal,
                            const NoiseModel& noise);

struct NoisyOperatorBound {
  double q_norm = 0.0;          // ||Q||_2 under pi
  double epsilon_bound = 0.0;   // delta_sup (1 + ||Q||_2)
  double epsilon_actual = 0.0;  // ||P - P_hat||_2 under pi
};

// Operator-level perturbation bound; epsilon_actual <= epsilon_bound.
NoisyOperatorBound noisy_operator_bound(const NoisyAnalysis& analysis, const Distribution& pi);

struct NoisyErrorBound {
  double alpha = 0.0;
  double epsilon = 0.0;  // the proposition-level bound delta_sup (1 + ||Q||_2)
  bounds::BoundResult bound;
};

// Cesaro-average error bound for the noisy chain, evaluated with epsilon set
// to the operator bound above. dist_mu is the distance from the start to
// P_hat's stationary distribution in the pi geometry. Not applicable when
// the operator bound reaches alpha.
NoisyErrorBound noisy_error_bound(double alpha, const NoisyAnalysis& analysis,
                                  const Distribution& pi, long t, double dist_mu);

}  // namespace noisy
}  // namespace mcperturb
