#include "nmc/autodiff.hpp"

namespace nmc {

Derivatives unpack(const Dual& result, Eigen::Index dim) {
  const auto d = static_cast<std::size_t>(dim);
  if (result.has_grad() && result.dim() != d) {
    throw UnsupportedPrimitive("derivative block dimension does not match the seeded block");
  }
  Derivatives out;
  out.value = result.value();
  out.gh.grad = Eigen::VectorXd::Zero(dim);
  out.gh.hess = Eigen::MatrixXd::Zero(dim, dim);
  for (std::size_t i = 0; i < d; ++i) {
    out.gh.grad[static_cast<Eigen::Index>(i)] = result.grad(i);
    for (std::size_t j = i; j < d; ++j) {
      const double h = result.hess(i, j);
      out.gh.hess(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = h;
      out.gh.hess(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = h;
    }
  }
  if (!std::isfinite(out.value) || !out.gh.grad.allFinite() || !out.gh.hess.allFinite()) {
    throw NonFiniteDerivative("non-finite value or derivative; point is likely outside the support");
  }
  return out;
}

}  // namespace nmc
