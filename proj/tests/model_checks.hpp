#pragma once

// Finite-difference checks of blanket derivatives, shared by the graph tests
// and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "nmc/autodiff.hpp"
#include "nmc/graph.hpp"
#include "support.hpp"

namespace oracle {

struct BlanketCheck {
  double grad_error = 0.0;  // max-norm error relative to the max-norm of the FD value
  double hess_error = 0.0;
};

// Simplex nodes are differentiated through v -> f(v / sum(v)), the same
// extension the sampler uses; other nodes directly.
inline BlanketCheck check_blanket(const nmc::Model& model, const nmc::World& world,
                                  nmc::NodeId id) {
  const nmc::BlanketScore f(model, world, id);
  const bool simplex = model.node(id).support.kind == nmc::SupportKind::Simplex;
  auto eval = [&](auto v) {
    using T = typename decltype(v)::value_type;
    if (!simplex) return f(std::span<const T>(v));
    T total = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) total = total + v[i];
    std::vector<T> scaled;
    for (const T& vi : v) scaled.push_back(vi / total);
    return f(std::span<const T>(scaled));
  };
  const Eigen::VectorXd& x = world.value(id);
  const nmc::Derivatives ad = nmc::evaluate_with_derivatives(
      [&](std::span<const nmc::Dual> v) { return eval(std::vector<nmc::Dual>(v.begin(), v.end())); },
      x);
  const double scale = model.node(id).support.kind == nmc::SupportKind::RealVector
                           ? std::max(1.0, x.cwiseAbs().maxCoeff())
                           : x.cwiseAbs().minCoeff();
  const double h = 1e-4 * scale;
  auto fd_fn = [&](const std::vector<double>& v) { return eval(v); };
  const Eigen::VectorXd g = fd_gradient<double>(fd_fn, x, h);
  // Hessian columns from central differences of the AD gradient: second
  // differences of the value lose too many digits on blankets with large
  // magnitude. The AD gradient itself is checked against the values above.
  const auto d = x.size();
  Eigen::MatrixXd hess(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    auto grad_i = [&](const std::vector<double>& v) {
      const Eigen::VectorXd at = Eigen::Map<const Eigen::VectorXd>(v.data(), d);
      return nmc::evaluate_with_derivatives(
                 [&](std::span<const nmc::Dual> w) {
                   return eval(std::vector<nmc::Dual>(w.begin(), w.end()));
                 },
                 at)
          .gh.grad[i];
    };
    hess.row(i) = fd_gradient<double>(grad_i, x, h).transpose();
  }
  const auto rel = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double denom = std::max(b.cwiseAbs().maxCoeff(), 1e-12);
    return (a - b).cwiseAbs().maxCoeff() / denom;
  };
  return {rel(ad.gh.grad, g), rel(ad.gh.hess, hess)};
}

}  // namespace oracle
