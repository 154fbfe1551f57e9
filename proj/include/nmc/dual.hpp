#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace nmc {

// Second-order forward-mode number over a d-dimensional active block.
//
// Carries the value, the gradient and the packed upper triangle of the
// Hessian with respect to the d seeded variables. An empty gradient or
// Hessian buffer stands for an exact zero, so constants and affine
// expressions stay allocation-free in the Hessian channel.
class Dual {
 public:
  Dual() = default;
  Dual(double value) : value_(value) {}  // NOLINT: implicit constant lift

  // The index-th seed of a d-dimensional block.
  static Dual variable(double value, std::size_t dim, std::size_t index);

  double value() const { return value_; }
  // Zero when neither channel has been touched.
  std::size_t dim() const { return grad_.size(); }
  bool has_grad() const { return !grad_.empty(); }
  bool has_hess() const { return !hess_.empty(); }

  std::span<const double> grad() const { return grad_; }
  // Packed row-major upper triangle, d(d+1)/2 entries.
  std::span<const double> packed_hess() const { return hess_; }

  double grad(std::size_t i) const { return grad_.empty() ? 0.0 : grad_[i]; }
  double hess(std::size_t i, std::size_t j) const;

  Dual& operator+=(const Dual& rhs);
  Dual& operator-=(const Dual& rhs);
  Dual& operator*=(const Dual& rhs);
  Dual& operator/=(const Dual& rhs);
  Dual& operator+=(double rhs) {
    value_ += rhs;
    return *this;
  }
  Dual& operator-=(double rhs) {
    value_ -= rhs;
    return *this;
  }
  Dual& operator*=(double rhs);
  Dual& operator/=(double rhs) { return *this *= 1.0 / rhs; }

  // f(this) given f, f' and f'' evaluated at value().
  Dual apply(double f0, double f1, double f2) const;

  // Accumulates scale * x into this, with matching block dimension.
  void add_scaled(const Dual& x, double scale);

  static std::size_t packed_size(std::size_t dim) { return dim * (dim + 1) / 2; }
  static std::size_t packed_index(std::size_t dim, std::size_t i, std::size_t j);

 private:
  friend Dual operator*(const Dual& a, const Dual& b);

  double value_ = 0.0;
  std::vector<double> grad_;
  std::vector<double> hess_;
};

inline Dual operator-(Dual a) {
  a *= -1.0;
  return a;
}
inline Dual operator+(Dual a, const Dual& b) { return a += b; }
inline Dual operator-(Dual a, const Dual& b) { return a -= b; }
Dual operator*(const Dual& a, const Dual& b);
inline Dual operator/(Dual a, const Dual& b) { return a /= b; }

inline Dual operator+(Dual a, double b) { return a += b; }
inline Dual operator+(double a, Dual b) { return b += a; }
inline Dual operator-(Dual a, double b) { return a -= b; }
inline Dual operator-(double a, Dual b) {
  b *= -1.0;
  b += a;
  return b;
}
inline Dual operator*(Dual a, double b) { return a *= b; }
inline Dual operator*(double a, Dual b) { return b *= a; }
inline Dual operator/(Dual a, double b) { return a /= b; }
Dual operator/(double a, const Dual& b);

// Registered primitives. Each has a double overload so generic code written
// inside this namespace resolves without silently lifting doubles to Dual.
inline double value_of(double x) { return x; }
inline double value_of(const Dual& x) { return x.value(); }

inline double square(double x) { return x * x; }
inline double log(double x) { return std::log(x); }
inline double exp(double x) { return std::exp(x); }
inline double log1p(double x) { return std::log1p(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double lgamma(double x) { return std::lgamma(x); }
inline double pow(double x, double p) { return std::pow(x, p); }
// log(1 + e^x), stable for large |x|.
double softplus(double x);
// log(1 / (1 + e^-x)).
inline double log_sigmoid(double x) { return -softplus(-x); }

Dual square(const Dual& x);
Dual log(const Dual& x);
Dual exp(const Dual& x);
Dual log1p(const Dual& x);
Dual sqrt(const Dual& x);
Dual lgamma(const Dual& x);
Dual pow(const Dual& x, double p);
Dual softplus(const Dual& x);
Dual log_sigmoid(const Dual& x);

// Sum of weights[i] * xs[i].
double dot(std::span<const double> weights, std::span<const double> xs);
Dual dot(std::span<const double> weights, std::span<const Dual> xs);

// Promotion helper for mixed double/Dual expressions.
template <class A, class B>
using promote_t = decltype(std::declval<A>() * std::declval<B>());

}  // namespace nmc
