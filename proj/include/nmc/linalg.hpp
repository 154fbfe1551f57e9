#pragma once

#include <Eigen/Dense>
#include <stdexcept>

namespace nmc {

class NoConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class SingularMatrix : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class NotPositiveDefinite : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense symmetric matrix; the input is symmetrized as (M + M^T) / 2 on
// construction so downstream factorizations see exact symmetry.
class SymmetricMatrix {
 public:
  explicit SymmetricMatrix(const Eigen::MatrixXd& m);

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXd& matrix() const { return entries_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return entries_(i, j); }

 private:
  Eigen::MatrixXd entries_;
};

struct EigenDecomposition {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns
};

EigenDecomposition eig_sym(const SymmetricMatrix& m);

// Default repair floor, 1e-8 * max(1, |lambda|_max).
double default_eig_floor(const EigenDecomposition& eig, double relative = 1e-8);

// Raises every eigenvalue below `floor` to `floor`. Inputs whose spectrum is
// already at or above the floor are returned unchanged.
SymmetricMatrix repair_psd(const SymmetricMatrix& m, double floor);

// Solves M x = b. Throws SingularMatrix when the condition estimate exceeds
// 1e12 or M has a zero eigenvalue.
Eigen::VectorXd solve(const SymmetricMatrix& m, const Eigen::VectorXd& b);

// Lower-triangular L with L L^T = M.
Eigen::MatrixXd cholesky(const SymmetricMatrix& m);

// Solves (L L^T) x = b given the factor from cholesky().
Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& lower, const Eigen::VectorXd& b);

}  // namespace nmc
