#include "mcperturb/chain.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "mcperturb/errors.hpp"

namespace mcperturb {

namespace {

constexpr double kMassTolerance = 1e-12;

void check_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw InvalidInputError(std::string(what) + ": entry is not finite");
  }
}

}  // namespace

StateSpace::StateSpace(int size) : size_(size) {
  if (size < 2) {
    throw InvalidInputError("state space needs at least two states, got " + std::to_string(size));
  }
}

StateSpace::StateSpace(int size, std::vector<std::string> labels) : StateSpace(size) {
  if (static_cast<int>(labels.size()) != size) {
    throw DimensionMismatchError("label count does not match state count");
  }
  labels_ = std::move(labels);
}

Distribution::Distribution(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw DimensionMismatchError("distribution over empty state space");
  }
  double total = 0.0;
  for (double w : weights_) {
    check_finite(w, "distribution");
    if (w < 0.0) {
      throw NegativeEntryError("distribution has a negative weight");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > kMassTolerance) {
    throw RowSumError("distribution mass " + std::to_string(total) + " is not one");
  }
  if (total != 1.0) {
    for (double& w : weights_) w /= total;
  }
}

Distribution Distribution::uniform(int n) {
  if (n < 1) throw DimensionMismatchError("uniform distribution needs a positive size");
  return Distribution(std::vector<double>(n, 1.0 / n));
}

Distribution Distribution::point_mass(int n, int state) {
  if (state < 0 || state >= n) {
    throw DimensionMismatchError("point mass state out of range");
  }
  std::vector<double> w(n, 0.0);
  w[state] = 1.0;
  return Distribution(std::move(w));
}

SignedMeasure::SignedMeasure(std::vector<double> weights) : weights_(std::move(weights)) {
  if (weights_.empty()) {
    throw DimensionMismatchError("signed measure over empty state space");
  }
  for (double w : weights_) check_finite(w, "signed measure");
}

SignedMeasure::SignedMeasure(const Distribution& a, const Distribution& b)
    : weights_(a.weights()) {
  if (a.size() != b.size()) {
    throw DimensionMismatchError("measure difference: sizes differ");
  }
  for (int i = 0; i < b.size(); ++i) weights_[i] -= b[i];
}

double SignedMeasure::total_mass() const {
  double total = 0.0;
  for (double w : weights_) total += w;
  return total;
}

Observable::Observable(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw DimensionMismatchError("observable over empty state space");
  }
  for (double v : values_) check_finite(v, "observable");
}

TransitionKernel::TransitionKernel(Matrix p, const StateSpace& space) : matrix_(std::move(p)) {
  const int n = space.size();
  if (matrix_.rows() != n || matrix_.cols() != n) {
    throw DimensionMismatchError("kernel must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  for (int i = 0; i < n; ++i) {
    double row_sum = 0.0;
    for (int j = 0; j < n; ++j) {
      const double v = matrix_(i, j);
      check_finite(v, "kernel");
      if (v < 0.0) {
        throw NegativeEntryError("kernel entry (" + std::to_string(i) + ", " + std::to_string(j) +
                                 ") is negative");
      }
      row_sum += v;
    }
    if (std::abs(row_sum - 1.0) > kMassTolerance) {
      throw RowSumError("kernel row " + std::to_string(i) + " sums to " +
                        std::to_string(row_sum));
    }
    if (row_sum != 1.0) {
      for (int j = 0; j < n; ++j) matrix_(i, j) /= row_sum;
    }
  }
}

TransitionKernel::TransitionKernel(Matrix p) : TransitionKernel(Matrix(p), StateSpace(p.rows())) {}

Distribution step(const Distribution& mu, const TransitionKernel& p) {
  return Distribution(left_apply(mu.weights(), p.matrix()));
}

Observable apply(const TransitionKernel& p, const Observable& f) {
  return Observable(right_apply(p.matrix(), f.values()));
}

double expectation(const Distribution& mu, const Observable& f) {
  if (mu.size() != f.size()) {
    throw DimensionMismatchError("expectation: sizes differ");
  }
  return dot(mu.weights(), f.values());
}

bool is_irreducible(const TransitionKernel& p) {
  const int n = p.size();
  // Breadth-first reachability along edges and along reversed edges; strong
  // connectivity of the positive-probability graph is exactly irreducibility.
  const auto reach = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<int> queue = {0};
    seen[0] = 1;
    while (!queue.empty()) {
      const int x = queue.back();
      queue.pop_back();
      for (int y = 0; y < n; ++y) {
        const double edge = forward ? p(x, y) : p(y, x);
        if (edge > 0.0 && !seen[y]) {
          seen[y] = 1;
          queue.push_back(y);
        }
      }
    }
    for (char s : seen)
      if (!s) return false;
    return true;
  };
  return reach(true) && reach(false);
}

Distribution stationary_distribution(const TransitionKernel& p, const StationaryOptions& opts) {
  if (!is_irreducible(p)) {
    throw ReducibleChainError("chain is reducible: stationary distribution is not unique");
  }
  const int n = p.size();
  // The returned vector satisfies ||vP - v||_1 <= tol; the candidate is only
  // accepted once that residual, not just the iterate movement, is small.
  std::vector<double> v(n, 1.0 / n);
  for (long it = 0; it < opts.max_iter; ++it) {
    std::vector<double> next = left_apply(v, p.matrix());
    double residual = 0.0;
    for (int i = 0; i < n; ++i) residual += std::abs(next[i] - v[i]);
    if (residual <= opts.tol) {
      return Distribution(std::move(v));
    }
    double total = 0.0;
    for (double x : next) total += x;
    for (double& x : next) x /= total;
    v = std::move(next);
  }
  // Periodic or slowly mixing chains stall under power iteration; the balance
  // equations still pin the answer down, so solve them directly:
  // (P^T - I) v = 0 with the last equation replaced by sum(v) = 1.
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
  std::vector<double> check = left_apply(x, p.matrix());
  double residual = 0.0;
  for (int i = 0; i < n; ++i) residual += std::abs(check[i] - x[i]);
  if (residual > std::max(opts.tol, 1e-12)) {
    throw NotConvergedError("stationary distribution: residual " + std::to_string(residual) +
                            " after direct solve");
  }
  return Distribution(std::move(x));
}

ReversibilityReport check_reversibility(const TransitionKernel& p, const Distribution& pi,
                                        double tol) {
  if (p.size() != pi.size()) {
    throw DimensionMismatchError("reversibility check: sizes differ");
  }
  ReversibilityReport report;
  for (int x = 0; x < p.size(); ++x) {
    for (int y = x + 1; y < p.size(); ++y) {
      const double gap = std::abs(pi[x] * p(x, y) - pi[y] * p(y, x));
      report.max_violation = std::max(report.max_violation, gap);
    }
  }
  report.reversible = report.max_violation <= tol;
  return report;
}

}  // namespace mcperturb
