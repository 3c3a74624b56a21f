#pragma once

#include <cstdint>
#include <vector>

#include "mcperturb/chain.hpp"
#include "mcperturb/linalg.hpp"

namespace mcperturb {
namespace spectral {

struct JacobiOptions {
  // Convergence: off-diagonal Frobenius mass at or below threshold times the
  // Frobenius norm of the input.
  double threshold = 1e-14;
  int max_sweeps = 100;
};

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column k pairs with values[k]
  int sweeps = 0;
};

// Cyclic Jacobi rotations on a symmetric matrix. Deterministic sweep order,
// no pivot searching, so results are bit-stable across platforms. Throws
// NotConvergedError when max_sweeps is exhausted.
SymmetricEigen jacobi_eigen(Matrix a, const JacobiOptions& opts = {});

enum class EigenMethod { jacobi, power_iteration };

struct SpectralReport {
  double alpha = 0.0;  // 1 - rho
  double rho = 0.0;    // largest nontrivial |eigenvalue|
  double top_eigenvalue = 0.0;
  std::vector<double> eigenvalues;  // ascending, includes the trivial one
  EigenMethod method = EigenMethod::jacobi;
  int sweeps = 0;
};

// Spectral gap of a reversible kernel. Conjugates P into symmetric
// coordinates, runs Jacobi, identifies the trivial eigenvalue by eigenvector
// alignment with sqrt(pi), and reports alpha = 1 - max nontrivial modulus.
// Throws NotReversibleError when detailed balance fails beyond
// reversibility_tol, and GapClosedError when alpha <= 1e-12.
SpectralReport spectral_gap(const TransitionKernel& p, const Distribution& pi,
                            double reversibility_tol = 1e-9);

struct OperatorNormReport {
  // Norm over all finite signed measures acting by nu -> nu A.
  double full_norm = 0.0;
  // Norm restricted to measures of zero total mass. For a reversible ergodic
  // kernel this equals 1 - alpha.
  double restricted_norm = 0.0;
  int sweeps = 0;
};

// pi-weighted operator norm of an arbitrary matrix acting on measures,
// computed as the top singular value of the conjugated matrix (full), and of
// its compression to the zero-mass subspace (restricted).
OperatorNormReport operator_norm(const Matrix& a, const Distribution& pi);

struct ContractionTrace {
  // distances(r, k) = weighted l2 distance from the target after k steps of
  // trial r; column 0 holds the initial distances.
  Matrix distances;
  // Per step, the largest observed one-step ratio across trials whose
  // previous distance exceeded 1e-6 (beneath that, cancellation noise in the
  // distances dominates the ratio); zero when no trial qualified.
  std::vector<double> max_step_ratio;
  double sup_step_ratio = 0.0;
};

// Evolves random start distributions under the kernel and records how fast
// they approach the target in the reference-weighted l2 norm. target and
// reference may differ (a perturbed kernel contracting toward its own
// stationary distribution, measured in the original geometry).
ContractionTrace empirical_contraction(const TransitionKernel& p, const Distribution& target,
                                       const Distribution& reference, int horizon, int trials,
                                       std::uint64_t seed);

}  // namespace spectral
}  // namespace mcperturb
