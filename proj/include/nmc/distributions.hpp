#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "nmc/dual.hpp"
#include "nmc/linalg.hpp"
#include "nmc/random.hpp"

namespace nmc {

class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class OutOfSupport : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class SupportKind { RealVector, PositiveReal, Simplex, Categorical, NonNegativeInteger };

struct Support {
  SupportKind kind = SupportKind::RealVector;
  // Simplex: K. Categorical: number of classes. Unused otherwise.
  std::size_t size = 0;

  static Support real() { return {SupportKind::RealVector, 0}; }
  static Support positive() { return {SupportKind::PositiveReal, 0}; }
  static Support simplex(std::size_t k) { return {SupportKind::Simplex, k}; }
  static Support categorical(std::size_t c) { return {SupportKind::Categorical, c}; }
  static Support nonnegative_integer() { return {SupportKind::NonNegativeInteger, 0}; }

  bool contains(std::span<const double> x) const;
  bool operator==(const Support&) const = default;
};

std::string to_string(SupportKind kind);

inline constexpr double kSimplexTolerance = 1e-9;

// Elementwise families broadcast parameters of length 1 against the value;
// otherwise every parameter has the value's length. Dirichlet is the one
// vector-valued family: its value is a single point on the K-simplex.
template <class T>
struct Normal {
  std::vector<T> loc, scale;
};
template <class T>
struct Gamma {
  std::vector<T> shape, rate;
};
template <class T>
struct Exponential {
  std::vector<T> rate;
};
template <class T>
struct StudentT {
  std::vector<T> df, loc, scale;
};
template <class T>
struct Bernoulli {
  std::vector<T> logits;
};
// probs is row-major n x classes, or a single row shared by all elements.
template <class T>
struct Categorical {
  std::vector<T> probs;
  std::size_t classes = 0;
};
template <class T>
struct Dirichlet {
  std::vector<T> concentration;
};
template <class T>
struct Poisson {
  std::vector<T> rate;
};

template <class T>
using Distribution = std::variant<Normal<T>, Gamma<T>, Exponential<T>, StudentT<T>,
                                  Bernoulli<T>, Categorical<T>, Dirichlet<T>, Poisson<T>>;

template <class T>
Support support_of(const Distribution<T>& dist);

namespace detail {

template <class T>
const T& at(const std::vector<T>& v, std::size_t i) {
  return v.size() == 1 ? v[0] : v[i];
}

template <class T>
void check_length(const std::vector<T>& v, std::size_t n, const char* what) {
  if (v.size() != 1 && v.size() != n) {
    throw InvalidParameter(std::string(what) + ": parameter length does not match value length");
  }
}

template <class T>
void check_positive(const std::vector<T>& v, const char* what) {
  for (const auto& p : v) {
    if (!(value_of(p) > 0.0)) throw InvalidParameter(std::string(what) + " must be positive");
  }
}

inline bool is_index(double x, double upper) {
  return x >= 0.0 && x < upper && std::floor(x) == x;
}

inline constexpr double kHalfLog2Pi = 0.91893853320467274178;

}  // namespace detail

template <class P, class X>
promote_t<P, X> log_density(const Normal<P>& d, std::span<const X> x) {
  using R = promote_t<P, X>;
  detail::check_length(d.loc, x.size(), "Normal loc");
  detail::check_length(d.scale, x.size(), "Normal scale");
  detail::check_positive(d.scale, "Normal scale");
  R acc(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& s = detail::at(d.scale, i);
    acc += -0.5 * square((x[i] - detail::at(d.loc, i)) / s) - log(s);
  }
  acc -= detail::kHalfLog2Pi * static_cast<double>(x.size());
  return acc;
}

template <class P, class X>
promote_t<P, X> log_density(const Gamma<P>& d, std::span<const X> x) {
  using R = promote_t<P, X>;
  detail::check_length(d.shape, x.size(), "Gamma shape");
  detail::check_length(d.rate, x.size(), "Gamma rate");
  detail::check_positive(d.shape, "Gamma shape");
  detail::check_positive(d.rate, "Gamma rate");
  R acc(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(value_of(x[i]) > 0.0)) return R(-std::numeric_limits<double>::infinity());
    const auto& a = detail::at(d.shape, i);
    const auto& b = detail::at(d.rate, i);
    acc += a * log(b) - lgamma(a) + (a - 1.0) * log(x[i]) - b * x[i];
  }
  return acc;
}

template <class P, class X>
promote_t<P, X> log_density(const Exponential<P>& d, std::span<const X> x) {
  using R = promote_t<P, X>;
  detail::check_length(d.rate, x.size(), "Exponential rate");
  detail::check_positive(d.rate, "Exponential rate");
  R acc(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(value_of(x[i]) > 0.0)) return R(-std::numeric_limits<double>::infinity());
    const auto& r = detail::at(d.rate, i);
    acc += log(r) - r * x[i];
  }
  return acc;
}

template <class P, class X>
promote_t<P, X> log_density(const StudentT<P>& d, std::span<const X> x) {
  using R = promote_t<P, X>;
  detail::check_length(d.df, x.size(), "StudentT df");
  detail::check_length(d.loc, x.size(), "StudentT loc");
  detail::check_length(d.scale, x.size(), "StudentT scale");
  detail::check_positive(d.df, "StudentT df");
  detail::check_positive(d.scale, "StudentT scale");
  R acc(0.0);
  if (d.df.size() == 1 && d.scale.size() == 1) {
    // shared normalizer, hoisted out of the per-element loop
    const auto& nu = d.df[0];
    const auto& s = d.scale[0];
    const auto norm = lgamma(0.5 * (nu + 1.0)) - lgamma(0.5 * nu) -
                      0.5 * log(nu * std::numbers::pi) - log(s);
    promote_t<P, X> quad(0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      quad += log1p(square((x[i] - detail::at(d.loc, i)) / s) / nu);
    }
    acc = norm * static_cast<double>(x.size()) - 0.5 * (nu + 1.0) * quad;
    return acc;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& nu = detail::at(d.df, i);
    const auto& s = detail::at(d.scale, i);
    acc += lgamma(0.5 * (nu + 1.0)) - lgamma(0.5 * nu) - 0.5 * log(nu * std::numbers::pi) -
           log(s) - 0.5 * (nu + 1.0) * log1p(square((x[i] - detail::at(d.loc, i)) / s) / nu);
  }
  return acc;
}

template <class P, class X>
promote_t<P, X> log_density(const Bernoulli<P>& d, std::span<const X> x) {
  using R = promote_t<P, X>;
  detail::check_length(d.logits, x.size(), "Bernoulli logits");
  R acc(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = value_of(x[i]);
    const auto& l = detail::at(d.logits, i);
    if (v == 1.0) {
      acc += log_sigmoid(l);
    } else if (v == 0.0) {
      acc += log_sigmoid(-l);
    } else {
      return R(-std::numeric_limits<double>::infinity());
    }
  }
  return acc;
}

template <class P, class X>
promote_t<P, X> log_density(const Categorical<P>& d, std::span<const X> x) {
  using R = promote_t<P, X>;
  const std::size_t c = d.classes;
  if (c == 0 || (d.probs.size() != c && d.probs.size() != c * x.size())) {
    throw InvalidParameter("Categorical: probs must have classes or n * classes entries");
  }
  const std::size_t rows = d.probs.size() / c;
  for (std::size_t r = 0; r < rows; ++r) {
    double total = 0.0;
    for (std::size_t k = 0; k < c; ++k) {
      const double p = value_of(d.probs[r * c + k]);
      if (!(p >= 0.0)) throw InvalidParameter("Categorical: negative probability");
      total += p;
    }
    if (std::abs(total - 1.0) > kSimplexTolerance) {
      throw InvalidParameter("Categorical: probabilities must sum to 1");
    }
  }
  R acc(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = value_of(x[i]);
    if (!detail::is_index(v, static_cast<double>(c))) {
      return R(-std::numeric_limits<double>::infinity());
    }
    const std::size_t row = rows == 1 ? 0 : i;
    acc += log(d.probs[row * c + static_cast<std::size_t>(v)]);
  }
  return acc;
}

template <class P, class X>
promote_t<P, X> log_density(const Dirichlet<P>& d, std::span<const X> x) {
  using R = promote_t<P, X>;
  const std::size_t k = d.concentration.size();
  if (k < 2) throw InvalidParameter("Dirichlet: need at least two components");
  detail::check_positive(d.concentration, "Dirichlet concentration");
  if (x.size() != k) return R(-std::numeric_limits<double>::infinity());
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double v = value_of(x[i]);
    if (!(v > 0.0)) return R(-std::numeric_limits<double>::infinity());
    total += v;
  }
  if (std::abs(total - 1.0) > kSimplexTolerance) {
    return R(-std::numeric_limits<double>::infinity());
  }
  P alpha_sum(0.0);
  for (const auto& a : d.concentration) alpha_sum += a;
  R acc = R(lgamma(alpha_sum));
  for (std::size_t i = 0; i < k; ++i) {
    const auto& a = d.concentration[i];
    acc += (a - 1.0) * log(x[i]) - lgamma(a);
  }
  return acc;
}

template <class P, class X>
promote_t<P, X> log_density(const Poisson<P>& d, std::span<const X> x) {
  using R = promote_t<P, X>;
  detail::check_length(d.rate, x.size(), "Poisson rate");
  detail::check_positive(d.rate, "Poisson rate");
  R acc(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = value_of(x[i]);
    if (!(v >= 0.0) || std::floor(v) != v) return R(-std::numeric_limits<double>::infinity());
    const auto& r = detail::at(d.rate, i);
    acc += v * log(r) - r - std::lgamma(v + 1.0);
  }
  return acc;
}

// Full normalized log-density; -inf outside the support.
template <class P, class X>
promote_t<P, X> log_density(const Distribution<P>& dist, std::span<const X> x) {
  return std::visit([&](const auto& d) { return log_density(d, x); }, dist);
}

template <class P>
double log_density(const Distribution<P>& dist, const Eigen::VectorXd& x) {
  return log_density(dist, std::span<const double>(x.data(), static_cast<std::size_t>(x.size())));
}

// Draws a value with `size` elements (K for Dirichlet).
Eigen::VectorXd sample(const Distribution<double>& dist, Rng& rng, std::size_t size);

// mean + L z, L L^T = covariance.
Eigen::VectorXd sample_mv_normal(const Eigen::VectorXd& mean, const SymmetricMatrix& covariance,
                                 Rng& rng);
double mv_normal_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                             const SymmetricMatrix& covariance);

// Elliptical Cauchy with density proportional to (1 + (x-b)^T A (x-b))^(-(d+1)/2).
// Draws b + L z / sqrt(g) with L L^T = A^-1 and g ~ chi-square(1).
Eigen::VectorXd sample_mv_cauchy(const Eigen::VectorXd& location, const SymmetricMatrix& a,
                                 Rng& rng);
double mv_cauchy_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& location,
                             const SymmetricMatrix& a);

// First k entries of a Fisher-Yates shuffle of 0..n-1.
std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng);

// Convenience constructors for scalar parameters.
template <class T>
Distribution<T> normal(T loc, T scale) {
  return Normal<T>{{std::move(loc)}, {std::move(scale)}};
}
template <class T>
Distribution<T> gamma(T shape, T rate) {
  return Gamma<T>{{std::move(shape)}, {std::move(rate)}};
}

}  // namespace nmc

namespace nmc {

template <class T>
Support support_of(const Distribution<T>& dist) {
  struct Visitor {
    Support operator()(const Normal<T>&) const { return Support::real(); }
    Support operator()(const Gamma<T>&) const { return Support::positive(); }
    Support operator()(const Exponential<T>&) const { return Support::positive(); }
    Support operator()(const StudentT<T>&) const { return Support::real(); }
    Support operator()(const Bernoulli<T>&) const { return Support::categorical(2); }
    Support operator()(const Categorical<T>& d) const { return Support::categorical(d.classes); }
    Support operator()(const Dirichlet<T>& d) const {
      return Support::simplex(d.concentration.size());
    }
    Support operator()(const Poisson<T>&) const { return Support::nonnegative_integer(); }
  };
  return std::visit(Visitor{}, dist);
}

}  // namespace nmc
