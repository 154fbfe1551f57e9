#include "nmc/dual.hpp"

#include <stdexcept>
#include <utility>

#include "nmc/special.hpp"

namespace nmc {

namespace {

// Upper-triangle accumulation of c * (u v^T + v u^T).
void add_sym_outer(std::vector<double>& hess, std::span<const double> u,
                   std::span<const double> v, double c) {
  const std::size_t d = u.size();
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i) {
    const double ui = c * u[i];
    const double vi = c * v[i];
    for (std::size_t j = i; j < d; ++j, ++k) {
      hess[k] += ui * v[j] + vi * u[j];
    }
  }
}

void add_outer(std::vector<double>& hess, std::span<const double> u, double c) {
  const std::size_t d = u.size();
  std::size_t k = 0;
  for (std::size_t i = 0; i < d; ++i) {
    const double ui = c * u[i];
    for (std::size_t j = i; j < d; ++j, ++k) {
      hess[k] += ui * u[j];
    }
  }
}

void axpy(std::vector<double>& y, double a, std::span<const double> x) {
  if (x.empty()) return;
  if (y.empty()) {
    y.assign(x.size(), 0.0);
  }
  if (y.size() != x.size()) throw std::length_error("Dual: mixed derivative block sizes");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

void scale(std::vector<double>& y, double a) {
  for (double& v : y) v *= a;
}

}  // namespace

Dual Dual::variable(double value, std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::out_of_range("Dual::variable: seed index out of range");
  Dual d(value);
  d.grad_.assign(dim, 0.0);
  d.grad_[index] = 1.0;
  return d;
}

std::size_t Dual::packed_index(std::size_t dim, std::size_t i, std::size_t j) {
  if (i > j) std::swap(i, j);
  // row i starts after sum_{r<i} (dim - r) entries
  return i * dim - (i * (i - 1)) / 2 + (j - i);
}

double Dual::hess(std::size_t i, std::size_t j) const {
  if (hess_.empty()) return 0.0;
  return hess_[packed_index(grad_.size(), i, j)];
}

Dual& Dual::operator+=(const Dual& rhs) {
  value_ += rhs.value_;
  axpy(grad_, 1.0, rhs.grad_);
  axpy(hess_, 1.0, rhs.hess_);
  return *this;
}

Dual& Dual::operator-=(const Dual& rhs) {
  value_ -= rhs.value_;
  axpy(grad_, -1.0, rhs.grad_);
  axpy(hess_, -1.0, rhs.hess_);
  return *this;
}

Dual& Dual::operator*=(double rhs) {
  value_ *= rhs;
  scale(grad_, rhs);
  scale(hess_, rhs);
  return *this;
}

Dual& Dual::operator*=(const Dual& rhs) {
  *this = *this * rhs;
  return *this;
}

Dual& Dual::operator/=(const Dual& rhs) {
  const double inv = 1.0 / rhs.value_;
  *this = *this * rhs.apply(inv, -inv * inv, 2.0 * inv * inv * inv);
  return *this;
}

void Dual::add_scaled(const Dual& x, double s) {
  value_ += s * x.value_;
  axpy(grad_, s, x.grad_);
  axpy(hess_, s, x.hess_);
}

Dual Dual::apply(double f0, double f1, double f2) const {
  Dual r(f0);
  if (grad_.empty()) return r;
  r.grad_.resize(grad_.size());
  for (std::size_t i = 0; i < grad_.size(); ++i) r.grad_[i] = f1 * grad_[i];
  if (!hess_.empty()) {
    r.hess_.resize(hess_.size());
    for (std::size_t k = 0; k < hess_.size(); ++k) r.hess_[k] = f1 * hess_[k];
  }
  if (f2 != 0.0) {
    if (r.hess_.empty()) r.hess_.assign(packed_size(grad_.size()), 0.0);
    add_outer(r.hess_, grad_, f2);
  }
  return r;
}

Dual operator*(const Dual& a, const Dual& b) {
  Dual r(a.value_ * b.value_);
  axpy(r.grad_, b.value_, a.grad_);
  axpy(r.grad_, a.value_, b.grad_);
  axpy(r.hess_, b.value_, a.hess_);
  axpy(r.hess_, a.value_, b.hess_);
  if (!a.grad_.empty() && !b.grad_.empty()) {
    if (a.grad_.size() != b.grad_.size()) {
      throw std::length_error("Dual: mixed derivative block sizes");
    }
    if (r.hess_.empty()) r.hess_.assign(Dual::packed_size(a.grad_.size()), 0.0);
    add_sym_outer(r.hess_, a.grad_, b.grad_, 1.0);
  }
  return r;
}

Dual operator/(double a, const Dual& b) {
  const double inv = 1.0 / b.value();
  return b.apply(a * inv, -a * inv * inv, 2.0 * a * inv * inv * inv);
}

double softplus(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

Dual square(const Dual& x) {
  const double v = x.value();
  return x.apply(v * v, 2.0 * v, 2.0);
}

Dual log(const Dual& x) {
  const double v = x.value();
  return x.apply(std::log(v), 1.0 / v, -1.0 / (v * v));
}

Dual exp(const Dual& x) {
  const double e = std::exp(x.value());
  return x.apply(e, e, e);
}

Dual log1p(const Dual& x) {
  const double v = x.value();
  const double inv = 1.0 / (1.0 + v);
  return x.apply(std::log1p(v), inv, -inv * inv);
}

Dual sqrt(const Dual& x) {
  const double s = std::sqrt(x.value());
  return x.apply(s, 0.5 / s, -0.25 / (s * x.value()));
}

Dual lgamma(const Dual& x) {
  const double v = x.value();
  return x.apply(std::lgamma(v), digamma(v), trigamma(v));
}

Dual pow(const Dual& x, double p) {
  const double v = x.value();
  return x.apply(std::pow(v, p), p * std::pow(v, p - 1.0),
                 p * (p - 1.0) * std::pow(v, p - 2.0));
}

Dual softplus(const Dual& x) {
  const double v = x.value();
  // sigmoid computed from the stable side
  const double s = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
  return x.apply(softplus(v), s, s * (1.0 - s));
}

Dual log_sigmoid(const Dual& x) { return -softplus(-x); }

double dot(std::span<const double> weights, std::span<const double> xs) {
  if (weights.size() != xs.size()) throw std::invalid_argument("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += weights[i] * xs[i];
  return acc;
}

Dual dot(std::span<const double> weights, std::span<const Dual> xs) {
  if (weights.size() != xs.size()) throw std::invalid_argument("dot: size mismatch");
  Dual acc;
  for (std::size_t i = 0; i < xs.size(); ++i) acc.add_scaled(xs[i], weights[i]);
  return acc;
}

}  // namespace nmc
