#include "mcperturb/noisy_mh.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mcperturb/errors.hpp"
#include "mcperturb/oracle.hpp"
#include "mcperturb/spectral.hpp"

namespace mcperturb {
namespace noisy {

TargetSpec::TargetSpec(std::vector<double> unnormalized_weights)
    : weights_(std::move(unnormalized_weights)) {
  if (weights_.size() < 2) {
    throw InvalidInputError("target needs at least two states");
  }
  for (double w : weights_) {
    if (!std::isfinite(w) || w <= 0.0) {
      throw ZeroMassStateError("target weights must be strictly positive");
    }
  }
}

Distribution TargetSpec::normalized() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  std::vector<double> out(weights_.size());
  for (std::size_t i = 0; i < weights_.size(); ++i) out[i] = weights_[i] / total;
  return Distribution(std::move(out));
}

ProposalSpec::ProposalSpec(TransitionKernel q) : kernel_(std::move(q)) {
  for (int x = 0; x < kernel_.size(); ++x) {
    for (int y = x + 1; y < kernel_.size(); ++y) {
      if ((kernel_(x, y) > 0.0) != (kernel_(y, x) > 0.0)) {
        throw SupportMismatchError("proposal support is not symmetric at pair (" +
                                   std::to_string(x) + ", " + std::to_string(y) + ")");
      }
    }
  }
}

const char* rule_name(NoiseRule rule) {
  switch (rule) {
    case NoiseRule::multiplicative: return "multiplicative";
    case NoiseRule::additive: return "additive";
    case NoiseRule::lognormal: return "lognormal";
  }
  return "unknown";
}

NoiseRule rule_from_name(const std::string& name) {
  if (name == "multiplicative") return NoiseRule::multiplicative;
  if (name == "additive") return NoiseRule::additive;
  if (name == "lognormal") return NoiseRule::lognormal;
  throw SpecParseError("unknown noise rule '" + name + "'");
}

double distorted_ratio(NoiseRule rule, double alpha, double z) {
  switch (rule) {
    case NoiseRule::multiplicative: return alpha * (1.0 + z);
    case NoiseRule::additive: return std::max(0.0, alpha + z);
    case NoiseRule::lognormal: return alpha * std::exp(z);
  }
  throw InvalidInputError("unknown noise rule");
}

NoiseModel::NoiseModel(NoiseRule rule, std::vector<std::vector<NoiseAtom>> per_state_atoms)
    : rule_(rule), atoms_(std::move(per_state_atoms)) {
  if (atoms_.size() < 2) {
    throw InvalidInputError("noise model needs atoms for at least two states");
  }
  for (auto& state_atoms : atoms_) {
    if (state_atoms.empty()) {
      throw InvalidInputError("noise model has a state with no atoms");
    }
    double total = 0.0;
    for (const NoiseAtom& a : state_atoms) {
      if (!std::isfinite(a.z) || !std::isfinite(a.prob) || a.prob < 0.0) {
        throw InvalidInputError("noise atom has invalid entries");
      }
      if (rule_ == NoiseRule::multiplicative && a.z < -1.0) {
        throw NegativeRatioError("multiplicative noise atom z = " + std::to_string(a.z) +
                                 " drives the acceptance ratio negative");
      }
      total += a.prob;
    }
    if (std::abs(total - 1.0) > 1e-12) {
      throw RowSumError("noise atom probabilities sum to " + std::to_string(total));
    }
    if (total != 1.0) {
      for (NoiseAtom& a : state_atoms) a.prob /= total;
    }
  }
}

NoiseModel NoiseModel::broadcast(NoiseRule rule, std::vector<NoiseAtom> atoms, int n) {
  return NoiseModel(rule, std::vector<std::vector<NoiseAtom>>(n, std::move(atoms)));
}

NoiseModel NoiseModel::noiseless(int n) {
  return broadcast(NoiseRule::multiplicative, {{0.0, 1.0}}, n);
}

double NoiseModel::expected_clipped(double alpha, int y) const {
  double acc = 0.0;
  for (const NoiseAtom& a : atoms_[y]) {
    acc += a.prob * std::min(1.0, distorted_ratio(rule_, alpha, a.z));
  }
  return acc;
}

double NoiseModel::expected_absolute_error(double alpha, int y) const {
  double acc = 0.0;
  for (const NoiseAtom& a : atoms_[y]) {
    acc += a.prob * std::abs(alpha - distorted_ratio(rule_, alpha, a.z));
  }
  return acc;
}

double NoiseModel::expected_signed_error(double alpha, int y) const {
  const double clipped = std::min(1.0, alpha);
  double acc = 0.0;
  for (const NoiseAtom& a : atoms_[y]) {
    acc += a.prob * (clipped - std::min(1.0, distorted_ratio(rule_, alpha, a.z)));
  }
  return acc;
}

NoiseModel NoiseModel::scaled(double c) const {
  if (!std::isfinite(c) || c < 0.0) {
    throw InvalidInputError("noise scale must be >= 0");
  }
  std::vector<std::vector<NoiseAtom>> scaled_atoms = atoms_;
  for (auto& state_atoms : scaled_atoms) {
    for (NoiseAtom& a : state_atoms) a.z *= c;
  }
  return NoiseModel(rule_, std::move(scaled_atoms));
}

double acceptance_ratio(const TargetSpec& target, const ProposalSpec& proposal, int x, int y) {
  const double forward = proposal(x, y);
  if (forward <= 0.0) return 0.0;
  return target.weight(y) * proposal(y, x) / (target.weight(x) * forward);
}

namespace {

void check_sizes(const TargetSpec& target, const ProposalSpec& proposal) {
  if (target.size() != proposal.size()) {
    throw DimensionMismatchError("target and proposal sizes differ");
  }
}

// Assembles a kernel from per-pair acceptance probabilities a(x, y) in [0,1]:
// off-diagonal q(y|x) a(x,y), diagonal takes the rest.
template <typename Accept>
TransitionKernel assemble_kernel(const ProposalSpec& proposal, Accept&& accept) {
  const int n = proposal.size();
  Matrix p(n, n, 0.0);
  for (int x = 0; x < n; ++x) {
    double moved = 0.0;
    for (int y = 0; y < n; ++y) {
      if (y == x || proposal(x, y) <= 0.0) continue;
      const double mass = proposal(x, y) * accept(x, y);
      p(x, y) = mass;
      moved += mass;
    }
    p(x, x) = 1.0 - moved;
  }
  return TransitionKernel(std::move(p));
}

}  // namespace

TransitionKernel build_mh_kernel(const TargetSpec& target, const ProposalSpec& proposal) {
  check_sizes(target, proposal);
  TransitionKernel p = assemble_kernel(proposal, [&](int x, int y) {
    return std::min(1.0, acceptance_ratio(target, proposal, x, y));
  });
  const ReversibilityReport rev = check_reversibility(p, target.normalized(), 1e-9);
  if (!rev.reversible) {
    throw NotReversibleError("constructed kernel violates detailed balance by " +
                             std::to_string(rev.max_violation));
  }
  return p;
}

TransitionKernel build_noisy_mh_kernel(const TargetSpec& target, const ProposalSpec& proposal,
                                       const NoiseModel& noise) {
  check_sizes(target, proposal);
  if (noise.size() != target.size()) {
    throw DimensionMismatchError("noise model size differs from target");
  }
  return assemble_kernel(proposal, [&](int x, int y) {
    return noise.expected_clipped(acceptance_ratio(target, proposal, x, y), y);
  });
}

NoisyAnalysis analyze_noise(const TargetSpec& target, const ProposalSpec& proposal,
                            const NoiseModel& noise) {
  check_sizes(target, proposal);
  if (noise.size() != target.size()) {
    throw DimensionMismatchError("noise model size differs from target");
  }
  const int n = target.size();

  NoisyAnalysis out{build_mh_kernel(target, proposal),
                    build_noisy_mh_kernel(target, proposal, noise),
                    proposal.kernel(),
                    Matrix(n, n, 0.0),
                    Matrix(n, n, 0.0),
                    std::vector<double>(n, 0.0),
                    std::vector<double>(n, 0.0),
                    Matrix(n, n, 0.0),
                    0.0,
                    0.0,
                    std::nullopt,
                    0.0};

  // The error fields run over every proposable pair, the diagonal included:
  // a self-proposal still draws z and evaluates the distorted ratio, and its
  // delta-prime mass is exactly what the diagonal of Z' - Gamma' cancels.
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double q = proposal(x, y);
      if (q <= 0.0) continue;
      const double alpha = acceptance_ratio(target, proposal, x, y);
      const double d = noise.expected_absolute_error(alpha, y);
      const double dp = noise.expected_signed_error(alpha, y);
      out.delta(x, y) = d;
      out.delta_prime(x, y) = dp;
      out.z_prime(x, y) = q * dp;
      out.gamma[x] += q * d;
      out.gamma_prime[x] += q * dp;
      out.delta_sup = std::max(out.delta_sup, d);
    }
  }

  double residual = 0.0;
  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      const double lhs = out.p(x, y) - out.p_hat(x, y);
      const double rhs = out.z_prime(x, y) - (x == y ? out.gamma_prime[x] : 0.0);
      residual = std::max(residual, std::abs(lhs - rhs));
    }
  }
  out.decomposition_residual = residual;

  if (is_irreducible(out.p_hat)) {
    const Distribution pi_hat = oracle::stationary_dense(out.p_hat);
    const ReversibilityReport rev = check_reversibility(out.p_hat, pi_hat, 1e-9);
    out.p_hat_reversible = rev.reversible;
    out.p_hat_reversibility_violation = rev.max_violation;
  }
  return out;
}

NoisyOperatorBound noisy_operator_bound(const NoisyAnalysis& analysis, const Distribution& pi) {
  NoisyOperatorBound out;
  out.q_norm = spectral::operator_norm(analysis.proposal.matrix(), pi).full_norm;
  out.epsilon_bound = analysis.delta_sup * (1.0 + out.q_norm);
  out.epsilon_actual =
      spectral::operator_norm(analysis.p.matrix() - analysis.p_hat.matrix(), pi).full_norm;
  return out;
}

NoisyErrorBound noisy_error_bound(double alpha, const NoisyAnalysis& analysis,
                                  const Distribution& pi, long t, double dist_mu) {
  NoisyErrorBound out;
  out.alpha = alpha;
  const NoisyOperatorBound op = noisy_operator_bound(analysis, pi);
  out.epsilon = op.epsilon_bound;
  out.bound = bounds::cesaro_bound(alpha, out.epsilon, t, dist_mu);
  return out;
}

}  // namespace noisy
}  // namespace mcperturb
