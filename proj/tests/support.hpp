#pragma once

// Shared oracles for the unit tests.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

namespace oracle {

// Richardson-extrapolated central differences. f takes std::vector<Real> and
// returns Real; evaluate in long double when the function allows it.
template <class Real, class F>
Eigen::VectorXd fd_gradient(F&& f, const Eigen::VectorXd& x, double h) {
  const auto d = x.size();
  std::vector<Real> base(x.data(), x.data() + d);
  auto central = [&](Eigen::Index i, Real step) {
    std::vector<Real> p = base, m = base;
    p[i] += step;
    m[i] -= step;
    return (f(p) - f(m)) / (2 * step);
  };
  Eigen::VectorXd g(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const Real coarse = central(i, Real(h));
    const Real fine = central(i, Real(h) / 2);
    g[i] = static_cast<double>((4 * fine - coarse) / 3);
  }
  return g;
}

template <class Real, class F>
Eigen::MatrixXd fd_hessian(F&& f, const Eigen::VectorXd& x, double h) {
  const auto d = x.size();
  std::vector<Real> base(x.data(), x.data() + d);
  auto shifted = [&](Eigen::Index i, Real si, Eigen::Index j, Real sj) {
    std::vector<Real> p = base;
    p[i] += si;
    p[j] += sj;
    return f(p);
  };
  auto second = [&](Eigen::Index i, Eigen::Index j, Real s) {
    if (i == j) {
      return (shifted(i, s, i, 0) - 2 * f(base) + shifted(i, -s, i, 0)) / (s * s);
    }
    return (shifted(i, s, j, s) - shifted(i, s, j, -s) - shifted(i, -s, j, s) +
            shifted(i, -s, j, -s)) /
           (4 * s * s);
  };
  Eigen::MatrixXd hess(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i; j < d; ++j) {
      const Real coarse = second(i, j, Real(h));
      const Real fine = second(i, j, Real(h) / 2);
      hess(i, j) = hess(j, i) = static_cast<double>((4 * fine - coarse) / 3);
    }
  }
  return hess;
}

// Largest |a - b| / max(|b|, floor) over all entries.
inline double max_rel_error(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                            double floor = 1e-3) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double denom = std::max(std::abs(b.data()[i]), floor);
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]) / denom);
  }
  return worst;
}

inline double rel_error(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace oracle
