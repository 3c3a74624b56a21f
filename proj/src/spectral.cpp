#include "mcperturb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mcperturb/errors.hpp"
#include "mcperturb/norms.hpp"
#include "mcperturb/rng.hpp"

namespace mcperturb {
namespace spectral {

namespace {

double off_diagonal_norm(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

// Conjugate A (acting on measures) into the symmetric coordinates of pi:
// B = D^(1/2) A D^(-1/2), entrywise B_ij = sqrt(pi_i) A_ij / sqrt(pi_j).
Matrix conjugate(const Matrix& a, const Distribution& pi) {
  if (a.rows() != pi.size() || a.cols() != pi.size()) {
    throw DimensionMismatchError("conjugation: matrix does not match distribution");
  }
  const int n = pi.size();
  std::vector<double> root(n);
  for (int i = 0; i < n; ++i) {
    if (pi[i] <= 0.0) {
      throw ZeroMassStateError("conjugation: weight distribution vanishes at state " +
                               std::to_string(i));
    }
    root[i] = std::sqrt(pi[i]);
  }
  Matrix b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) b(i, j) = root[i] * a(i, j) / root[j];
  return b;
}

Matrix symmetrize(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) out(i, j) = 0.5 * (a(i, j) + a(j, i));
  return out;
}

// Largest singular value of M restricted (on the input side) to the range of
// the symmetric projector applied beforehand; pass M directly for the full
// norm. Works through the Gram matrix M^T M, which Jacobi handles well at
// these sizes.
std::pair<double, int> top_singular_value(const Matrix& m) {
  const Matrix gram = symmetrize(transpose(m) * m);
  SymmetricEigen eig = jacobi_eigen(gram);
  const double lam = eig.values.empty() ? 0.0 : eig.values.back();
  return {std::sqrt(std::max(0.0, lam)), eig.sweeps};
}

}  // namespace

SymmetricEigen jacobi_eigen(Matrix a, const JacobiOptions& opts) {
  const int n = a.rows();
  if (a.cols() != n) {
    throw DimensionMismatchError("eigensolve: matrix must be square");
  }
  SymmetricEigen out;
  out.vectors = Matrix::identity(n);
  const double scale = frobenius_norm(a);
  const double stop = opts.threshold * std::max(scale, 1e-300);

  int sweep = 0;
  while (off_diagonal_norm(a) > stop) {
    if (sweep >= opts.max_sweeps) {
      throw NotConvergedError("eigensolve: no convergence in " +
                              std::to_string(opts.max_sweeps) + " sweeps");
    }
    ++sweep;
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = out.vectors(k, p);
          const double vkq = out.vectors(k, q);
          out.vectors(k, p) = c * vkp - s * vkq;
          out.vectors(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  out.sweeps = sweep;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  Matrix sorted(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (int r = 0; r < n; ++r) sorted(r, k) = out.vectors(r, order[k]);
  }
  out.vectors = std::move(sorted);
  return out;
}

SpectralReport spectral_gap(const TransitionKernel& p, const Distribution& pi,
                            double reversibility_tol) {
  const ReversibilityReport rev = check_reversibility(p, pi, reversibility_tol);
  if (!rev.reversible) {
    throw NotReversibleError("spectral gap needs detailed balance; max violation " +
                             std::to_string(rev.max_violation));
  }
  const int n = p.size();
  SymmetricEigen eig = jacobi_eigen(symmetrize(conjugate(p.matrix(), pi)));

  // The trivial eigenvalue pairs with the eigenvector sqrt(pi), which is a
  // unit vector. Identify it by alignment rather than by value so a slow
  // chain whose second eigenvalue also sits near 1 cannot be mistaken for it.
  std::vector<double> root(n);
  for (int i = 0; i < n; ++i) root[i] = std::sqrt(pi[i]);
  int top = -1;
  for (int k = 0; k < n; ++k) {
    double cosine = 0.0, norm_sq = 0.0;
    for (int r = 0; r < n; ++r) {
      cosine += eig.vectors(r, k) * root[r];
      norm_sq += eig.vectors(r, k) * eig.vectors(r, k);
    }
    if (std::abs(cosine) / std::sqrt(norm_sq) > 0.999) {
      top = k;
      break;
    }
  }
  if (top < 0 || std::abs(eig.values[top] - 1.0) > 1e-10) {
    // With a multiple eigenvalue at 1 the eigenbasis of that eigenspace is
    // arbitrary and need not contain a vector aligned with sqrt(pi); the
    // chain then has no gap at all, which is the real problem to report.
    int near_one = 0;
    for (int k = 0; k < n; ++k) {
      if (std::abs(eig.values[k] - 1.0) <= 1e-9) ++near_one;
    }
    if (near_one >= 2) {
      throw GapClosedError("spectral gap is numerically zero (eigenvalue 1 is multiple)");
    }
    throw NotConvergedError("spectral gap: trivial eigenvalue not recovered near 1");
  }

  SpectralReport report;
  report.top_eigenvalue = eig.values[top];
  report.eigenvalues = eig.values;
  report.method = EigenMethod::jacobi;
  report.sweeps = eig.sweeps;
  double rho = 0.0;
  for (int k = 0; k < n; ++k) {
    if (k == top) continue;
    rho = std::max(rho, std::abs(eig.values[k]));
  }
  report.rho = rho;
  report.alpha = 1.0 - rho;
  if (report.alpha <= 1e-12) {
    throw GapClosedError("spectral gap is numerically zero (alpha = " +
                         std::to_string(report.alpha) + ")");
  }
  return report;
}

OperatorNormReport operator_norm(const Matrix& a, const Distribution& pi) {
  const Matrix b = conjugate(a, pi);
  const int n = b.rows();

  OperatorNormReport report;
  auto [full, full_sweeps] = top_singular_value(b);
  report.full_norm = full;

  // Zero-total-mass measures correspond to vectors orthogonal to sqrt(pi) in
  // the symmetric coordinates; compress with the projector I - s s^T.
  std::vector<double> root(n);
  for (int i = 0; i < n; ++i) root[i] = std::sqrt(pi[i]);
  Matrix projected(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = b(i, j);
      for (int k = 0; k < n; ++k) v -= root[i] * root[k] * b(k, j);
      projected(i, j) = v;
    }
  }
  auto [restricted, proj_sweeps] = top_singular_value(projected);
  report.restricted_norm = restricted;
  report.sweeps = full_sweeps + proj_sweeps;
  return report;
}

ContractionTrace empirical_contraction(const TransitionKernel& p, const Distribution& target,
                                       const Distribution& reference, int horizon, int trials,
                                       std::uint64_t seed) {
  if (horizon < 2) throw InvalidInputError("contraction trace needs horizon >= 2");
  if (trials < 1) throw InvalidInputError("contraction trace needs trials >= 1");
  if (target.size() != p.size() || reference.size() != p.size()) {
    throw DimensionMismatchError("contraction trace: sizes differ");
  }
  const int n = p.size();

  ContractionTrace trace;
  trace.distances = Matrix(trials, horizon + 1);
  trace.max_step_ratio.assign(horizon, 0.0);

  for (int r = 0; r < trials; ++r) {
    RngStream rng(seed, static_cast<std::uint64_t>(r));
    std::vector<double> w(n);
    double total = 0.0;
    for (double& x : w) {
      x = 0.1 + rng.next_double();
      total += x;
    }
    for (double& x : w) x /= total;
    Distribution mu{std::move(w)};

    trace.distances(r, 0) = l2_distance(mu, target, reference);
    for (int k = 1; k <= horizon; ++k) {
      mu = step(mu, p);
      const double d = l2_distance(mu, target, reference);
      trace.distances(r, k) = d;
      const double prev = trace.distances(r, k - 1);
      // Below 1e-6 the distances sit close enough to the cancellation noise
      // floor (~1e-15 absolute) that one-step ratios lose ~1e-9 accuracy.
      if (prev > 1e-6) {
        const double ratio = d / prev;
        trace.max_step_ratio[k - 1] = std::max(trace.max_step_ratio[k - 1], ratio);
        trace.sup_step_ratio = std::max(trace.sup_step_ratio, ratio);
      }
    }
  }
  return trace;
}

}  // namespace spectral
}  // namespace mcperturb
