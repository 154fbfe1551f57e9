#include "nmc/random.hpp"

#include <cmath>
#include <stdexcept>

namespace nmc {

double uniform01(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double x = u(rng);
  while (x <= 0.0) x = u(rng);
  return x;
}

double standard_normal(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(rng);
}

double log_gamma_draw(double shape, Rng& rng) {
  if (!(shape > 0.0)) throw std::invalid_argument("log_gamma_draw: shape must be positive");
  if (shape >= 1.0) {
    std::gamma_distribution<double> g(shape, 1.0);
    double x = g(rng);
    while (x <= 0.0) x = g(rng);
    return std::log(x);
  }
  // G(a) = G(a + 1) * U^(1/a)
  std::gamma_distribution<double> g(shape + 1.0, 1.0);
  double x = g(rng);
  while (x <= 0.0) x = g(rng);
  return std::log(x) + std::log(uniform01(rng)) / shape;
}

double gamma_draw(double shape, double rate, Rng& rng) {
  if (!(rate > 0.0)) throw std::invalid_argument("gamma_draw: rate must be positive");
  return std::exp(log_gamma_draw(shape, rng)) / rate;
}

}  // namespace nmc
