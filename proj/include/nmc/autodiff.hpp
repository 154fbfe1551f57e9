#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nmc/dual.hpp"

namespace nmc {

// Raised when a value, gradient or Hessian entry comes back NaN/Inf,
// typically because the function was evaluated outside its support.
class NonFiniteDerivative : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Primitives are dispatched by overload resolution on Dual, so a function
// built from anything outside the registered set fails to compile. This
// error is raised for the one runtime escape hatch: an operand whose block
// dimension disagrees with the seeded block.
class UnsupportedPrimitive : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct GradHess {
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;

  Eigen::Index dim() const { return grad.size(); }
};

struct Derivatives {
  double value = 0.0;
  GradHess gh;
};

// Unpacks a Dual result into a dense gradient and a mirrored Hessian.
// Throws NonFiniteDerivative on any NaN/Inf entry.
Derivatives unpack(const Dual& result, Eigen::Index dim);

// Exact value, gradient and Hessian of f at x. f is any callable accepting
// std::span<const Dual> and returning Dual (generic lambdas over the
// primitives in dual.hpp qualify).
template <class F>
Derivatives evaluate_with_derivatives(F&& f, const Eigen::VectorXd& x) {
  const auto d = static_cast<std::size_t>(x.size());
  std::vector<Dual> seeds;
  seeds.reserve(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (!std::isfinite(x[static_cast<Eigen::Index>(i)])) {
      throw NonFiniteDerivative("evaluate_with_derivatives: non-finite input");
    }
    seeds.push_back(Dual::variable(x[static_cast<Eigen::Index>(i)], d, i));
  }
  try {
    const Dual result = f(std::span<const Dual>(seeds));
    return unpack(result, x.size());
  } catch (const std::length_error& e) {
    throw UnsupportedPrimitive(e.what());
  }
}

}  // namespace nmc
