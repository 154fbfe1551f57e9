#include "nmc/special.hpp"

#include <cmath>
#include <limits>

namespace nmc {

namespace {
constexpr double kAsymptoticThreshold = 10.0;
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double result = 0.0;
  // psi(x) = psi(x + 1) - 1/x
  while (x < kAsymptoticThreshold) {
    result -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Bernoulli-number series, truncation error below 1e-15 for x >= 10.
  const double tail =
      inv2 * (1.0 / 12.0 -
              inv2 * (1.0 / 120.0 -
                      inv2 * (1.0 / 252.0 -
                              inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0)))));
  return result + std::log(x) - 0.5 * inv - tail;
}

double trigamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double result = 0.0;
  // psi1(x) = psi1(x + 1) + 1/x^2
  while (x < kAsymptoticThreshold) {
    result += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double tail =
      inv * (1.0 +
             inv * (0.5 +
                    inv * (1.0 / 6.0 -
                           inv2 * (1.0 / 30.0 -
                                   inv2 * (1.0 / 42.0 -
                                           inv2 * (1.0 / 30.0 -
                                                   inv2 * (5.0 / 66.0)))))));
  return result + tail;
}

}  // namespace nmc
