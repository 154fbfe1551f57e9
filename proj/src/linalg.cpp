#include "nmc/linalg.hpp"

#include <cmath>
#include <limits>

namespace nmc {

namespace {
constexpr double kMaxCondition = 1e12;
}

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("SymmetricMatrix: expected a non-empty square matrix");
  }
  entries_ = 0.5 * (m + m.transpose());
}

EigenDecomposition eig_sym(const SymmetricMatrix& m) {
  if (!m.matrix().allFinite()) throw NoConvergence("eig_sym: non-finite input");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m.matrix());
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("eig_sym: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double default_eig_floor(const EigenDecomposition& eig, double relative) {
  const double largest = eig.values.cwiseAbs().maxCoeff();
  return relative * std::max(1.0, largest);
}

SymmetricMatrix repair_psd(const SymmetricMatrix& m, double floor) {
  if (!(floor > 0.0)) throw std::invalid_argument("repair_psd: floor must be positive");
  const EigenDecomposition eig = eig_sym(m);
  // Reconstruction rounding can leave a repaired eigenvalue a few ulps under
  // the floor; treat those as already repaired so the map is idempotent.
  const double slack = floor * 1e-6 + 64.0 * std::numeric_limits<double>::epsilon() *
                                           eig.values.cwiseAbs().maxCoeff();
  if (eig.values.minCoeff() >= floor - slack) return m;
  const Eigen::VectorXd clamped = eig.values.cwiseMax(floor);
  return SymmetricMatrix(eig.vectors * clamped.asDiagonal() * eig.vectors.transpose());
}

Eigen::VectorXd solve(const SymmetricMatrix& m, const Eigen::VectorXd& b) {
  if (b.size() != m.dim()) throw std::invalid_argument("solve: dimension mismatch");
  const EigenDecomposition eig = eig_sym(m);
  const Eigen::VectorXd mags = eig.values.cwiseAbs();
  const double smallest = mags.minCoeff();
  const double largest = mags.maxCoeff();
  if (smallest == 0.0 || largest / smallest > kMaxCondition) {
    throw SingularMatrix("solve: matrix is singular to working precision");
  }
  Eigen::VectorXd x = m.matrix().partialPivLu().solve(b);
  const double tol = 1e-10 * std::max(b.norm(), std::numeric_limits<double>::min());
  if (x.allFinite() && (m.matrix() * x - b).norm() <= tol) return x;
  const Eigen::VectorXd coeffs = (eig.vectors.transpose() * b).cwiseQuotient(eig.values);
  return eig.vectors * coeffs;
}

Eigen::MatrixXd cholesky(const SymmetricMatrix& m) {
  Eigen::LLT<Eigen::MatrixXd> llt(m.matrix());
  if (llt.info() != Eigen::Success) {
    throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  }
  Eigen::MatrixXd lower = llt.matrixL();
  if (!lower.allFinite()) throw NotPositiveDefinite("cholesky: non-finite factor");
  return lower;
}

Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& lower, const Eigen::VectorXd& b) {
  const auto l = lower.triangularView<Eigen::Lower>();
  Eigen::VectorXd y = l.solve(b);
  return l.transpose().solve(y);
}

}  // namespace nmc
