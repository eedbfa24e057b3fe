#include "epsbias/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace epsbias {

namespace {

void project_out(Eigen::VectorXd& v, const std::vector<Eigen::VectorXd>& deflate) {
  for (const auto& d : deflate) v -= d.dot(v) * d;
}

}  // namespace

TopEigen top_eigen_iterative(Eigen::Index n, const SymOperator& op,
                             const std::vector<Eigen::VectorXd>& deflate, double tol,
                             std::uint64_t max_matvecs, std::uint64_t seed, double fail_above) {
  TopEigen out;
  const auto free_dim = n - static_cast<Eigen::Index>(deflate.size());
  if (free_dim <= 0) {
    out.converged = true;
    return out;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = gauss(rng);
  project_out(start, deflate);
  start.normalize();

  const Eigen::Index krylov = std::min<Eigen::Index>(free_dim, 80);
  Eigen::MatrixXd basis(n, krylov);
  Eigen::VectorXd w(n), y(n), ay(n);

  while (out.matvecs < max_matvecs) {
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(krylov);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(krylov);
    basis.col(0) = start;
    Eigen::Index m = 0;
    for (Eigen::Index j = 0; j < krylov; ++j) {
      op(basis.col(j), w);
      ++out.matvecs;
      project_out(w, deflate);
      alpha[j] = basis.col(j).dot(w);
      // full reorthogonalization, applied twice for stability
      for (int pass = 0; pass < 2; ++pass) {
        Eigen::VectorXd coeff = basis.leftCols(j + 1).transpose() * w;
        w -= basis.leftCols(j + 1) * coeff;
      }
      project_out(w, deflate);
      m = j + 1;
      if (j + 1 < krylov) {
        beta[j] = w.norm();
        if (beta[j] < 1e-13) break;
        basis.col(j + 1) = w / beta[j];
      }
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      t(j, j) = alpha[j];
      if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    Eigen::Index top = 0;
    es.eigenvalues().maxCoeff(&top);
    y = basis.leftCols(m) * es.eigenvectors().col(top);
    project_out(y, deflate);
    y.normalize();
    op(y, ay);
    ++out.matvecs;
    project_out(ay, deflate);
    out.value = y.dot(ay);
    out.residual = (ay - out.value * y).norm();
    if (out.residual <= tol) {
      out.converged = true;
      return out;
    }
    if (out.value > fail_above) {
      out.exceeded = true;
      return out;
    }
    start = y;
  }
  return out;
}

double top_eigen_dense(const Eigen::MatrixXd& a) {
  if (a.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double top_singular_dense(const Eigen::MatrixXd& c) {
  if (c.size() == 0) return 0.0;
  Eigen::MatrixXd gram(c.cols(), c.cols());
  gram.setZero();
  gram.selfadjointView<Eigen::Lower>().rankUpdate(c.transpose());
  gram.triangularView<Eigen::StrictlyUpper>() = gram.transpose();
  return std::sqrt(std::max(0.0, top_eigen_dense(gram)));
}

}  // namespace epsbias
