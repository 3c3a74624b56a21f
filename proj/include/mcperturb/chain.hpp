#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mcperturb/linalg.hpp"

namespace mcperturb {

// Finite state space: a size and optional per-state labels.
class StateSpace {
 public:
  explicit StateSpace(int size);
  StateSpace(int size, std::vector<std::string> labels);

  int size() const { return size_; }
  bool has_labels() const { return !labels_.empty(); }
  const std::vector<std::string>& labels() const { return labels_; }

 private:
  int size_;
  std::vector<std::string> labels_;
};

// Probability distribution over a finite state space. Entries are
// nonnegative and sum to one; inputs whose total deviates from one by at most
// 1e-12 are rescaled, anything further off is rejected.
class Distribution {
 public:
  explicit Distribution(std::vector<double> weights);

  static Distribution uniform(int n);
  static Distribution point_mass(int n, int state);

  int size() const { return static_cast<int>(weights_.size()); }
  double operator[](int i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  std::vector<double> weights_;
};

// Signed measure: arbitrary real mass per state. Differences of
// distributions land here.
class SignedMeasure {
 public:
  explicit SignedMeasure(std::vector<double> weights);
  SignedMeasure(const Distribution& a, const Distribution& b);  // a - b

  int size() const { return static_cast<int>(weights_.size()); }
  double operator[](int i) const { return weights_[i]; }
  const std::vector<double>& weights() const { return weights_; }

  double total_mass() const;

 private:
  std::vector<double> weights_;
};

// Real-valued function on the state space.
class Observable {
 public:
  explicit Observable(std::vector<double> values);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> values_;
};

// Row-stochastic transition matrix. Construction validates: square shape
// matching the state space, no negative entries, every row sum within 1e-12
// of one (rows are then rescaled exactly).
class TransitionKernel {
 public:
  TransitionKernel(Matrix p, const StateSpace& space);
  explicit TransitionKernel(Matrix p);

  int size() const { return matrix_.rows(); }
  double operator()(int i, int j) const { return matrix_(i, j); }
  const Matrix& matrix() const { return matrix_; }

 private:
  Matrix matrix_;
};

// Pushes a distribution through the kernel: mu P.
Distribution step(const Distribution& mu, const TransitionKernel& p);

// Applies the kernel to an observable: (P f)(x) = sum_y P(x, y) f(y).
Observable apply(const TransitionKernel& p, const Observable& f);

// Expectation of f under mu.
double expectation(const Distribution& mu, const Observable& f);

// True when every state can reach and be reached from state 0 through
// positive transition probabilities.
bool is_irreducible(const TransitionKernel& p);

struct StationaryOptions {
  double tol = 1e-13;
  long max_iter = 100000;
};

// Stationary distribution of an irreducible kernel. Runs power iteration from
// the uniform distribution until successive iterates agree to within tol in
// max norm; if the budget runs out, falls back to a dense solve of the
// balance equations. Throws ReducibleChainError when the chain is reducible.
Distribution stationary_distribution(const TransitionKernel& p, const StationaryOptions& opts = {});

struct ReversibilityReport {
  bool reversible = false;
  // max_{x,y} |pi(x) P(x,y) - pi(y) P(y,x)|
  double max_violation = 0.0;
};

ReversibilityReport check_reversibility(const TransitionKernel& p, const Distribution& pi,
                                        double tol = 1e-9);

}  // namespace mcperturb
