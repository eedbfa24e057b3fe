#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace epsbias {

/// y = A x for a symmetric positive semidefinite operator A.
using SymOperator = std::function<void(const Eigen::VectorXd& x, Eigen::VectorXd& y)>;

struct TopEigen {
  double value = 0.0;     // Rayleigh quotient of the returned vector
  double residual = 0.0;  // ||A y - value y|| for unit y
  std::uint64_t matvecs = 0;
  bool converged = false;
  bool exceeded = false;  // stopped early because value > fail_above
};

/// Largest eigenvalue of A restricted to the orthogonal complement of the
/// (orthonormal) vectors in `deflate`. Restarted Lanczos with full
/// reorthogonalization; every iterate is re-projected against `deflate`.
/// Stops once the residual drops to `tol`, or as soon as the Rayleigh
/// quotient exceeds `fail_above` (a certain lower bound on the top eigenvalue).
TopEigen top_eigen_iterative(Eigen::Index n, const SymOperator& op,
                             const std::vector<Eigen::VectorXd>& deflate, double tol = 1e-8,
                             std::uint64_t max_matvecs = 200000, std::uint64_t seed = 7,
                             double fail_above = std::numeric_limits<double>::infinity());

/// Largest eigenvalue of a dense symmetric matrix.
double top_eigen_dense(const Eigen::MatrixXd& a);

/// Largest singular value of a dense matrix via the eigenvalues of C^T C.
double top_singular_dense(const Eigen::MatrixXd& c);

}  // namespace epsbias
