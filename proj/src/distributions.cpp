#include "nmc/distributions.hpp"

#include <algorithm>
#include <numeric>

namespace nmc {

bool Support::contains(std::span<const double> x) const {
  switch (kind) {
    case SupportKind::RealVector:
      return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
    case SupportKind::PositiveReal:
      return std::all_of(x.begin(), x.end(),
                         [](double v) { return v > 0.0 && std::isfinite(v); });
    case SupportKind::Simplex: {
      if (x.size() != size) return false;
      double total = 0.0;
      for (double v : x) {
        if (!(v > 0.0)) return false;
        total += v;
      }
      return std::abs(total - 1.0) <= kSimplexTolerance;
    }
    case SupportKind::Categorical:
      return std::all_of(x.begin(), x.end(), [this](double v) {
        return detail::is_index(v, static_cast<double>(size));
      });
    case SupportKind::NonNegativeInteger:
      return std::all_of(x.begin(), x.end(), [](double v) {
        return v >= 0.0 && std::isfinite(v) && std::floor(v) == v;
      });
  }
  return false;
}

std::string to_string(SupportKind kind) {
  switch (kind) {
    case SupportKind::RealVector:
      return "real";
    case SupportKind::PositiveReal:
      return "positive";
    case SupportKind::Simplex:
      return "simplex";
    case SupportKind::Categorical:
      return "categorical";
    case SupportKind::NonNegativeInteger:
      return "nonnegative_integer";
  }
  return "unknown";
}

namespace {

std::size_t draw_index(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    acc += probs[k];
    if (u < acc) return k;
  }
  // rounding left u above the cumulative sum; take the last nonzero class
  for (std::size_t k = probs.size(); k-- > 0;) {
    if (probs[k] > 0.0) return k;
  }
  return probs.size() - 1;
}

struct Sampler {
  Rng& rng;
  std::size_t n;

  Eigen::VectorXd operator()(const Normal<double>& d) const {
    detail::check_positive(d.scale, "Normal scale");
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      out[static_cast<Eigen::Index>(i)] =
          detail::at(d.loc, i) + detail::at(d.scale, i) * standard_normal(rng);
    }
    return out;
  }
  Eigen::VectorXd operator()(const Gamma<double>& d) const {
    detail::check_positive(d.shape, "Gamma shape");
    detail::check_positive(d.rate, "Gamma rate");
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      double v = gamma_draw(detail::at(d.shape, i), detail::at(d.rate, i), rng);
      out[static_cast<Eigen::Index>(i)] = std::max(v, std::numeric_limits<double>::min());
    }
    return out;
  }
  Eigen::VectorXd operator()(const Exponential<double>& d) const {
    detail::check_positive(d.rate, "Exponential rate");
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      out[static_cast<Eigen::Index>(i)] = -std::log(uniform01(rng)) / detail::at(d.rate, i);
    }
    return out;
  }
  Eigen::VectorXd operator()(const StudentT<double>& d) const {
    detail::check_positive(d.df, "StudentT df");
    detail::check_positive(d.scale, "StudentT scale");
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double nu = detail::at(d.df, i);
      const double chi2 = 2.0 * gamma_draw(0.5 * nu, 1.0, rng);
      out[static_cast<Eigen::Index>(i)] =
          detail::at(d.loc, i) + detail::at(d.scale, i) * standard_normal(rng) / std::sqrt(chi2 / nu);
    }
    return out;
  }
  Eigen::VectorXd operator()(const Bernoulli<double>& d) const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const double p = std::exp(log_sigmoid(detail::at(d.logits, i)));
      out[static_cast<Eigen::Index>(i)] = uniform01(rng) < p ? 1.0 : 0.0;
    }
    return out;
  }
  Eigen::VectorXd operator()(const Categorical<double>& d) const {
    const std::size_t c = d.classes;
    if (c == 0 || (d.probs.size() != c && d.probs.size() != c * n)) {
      throw InvalidParameter("Categorical: probs must have classes or n * classes entries");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    const bool shared = d.probs.size() == c;
    for (std::size_t i = 0; i < n; ++i) {
      std::span<const double> row(d.probs.data() + (shared ? 0 : i * c), c);
      out[static_cast<Eigen::Index>(i)] = static_cast<double>(draw_index(row, rng));
    }
    return out;
  }
  Eigen::VectorXd operator()(const Dirichlet<double>& d) const {
    detail::check_positive(d.concentration, "Dirichlet concentration");
    const auto k = static_cast<Eigen::Index>(d.concentration.size());
    Eigen::VectorXd logs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
      logs[i] = log_gamma_draw(d.concentration[static_cast<std::size_t>(i)], rng);
    }
    const double top = logs.maxCoeff();
    Eigen::VectorXd out = (logs.array() - top).exp().matrix();
    out /= out.sum();
    out = out.cwiseMax(std::numeric_limits<double>::min());
    out /= out.sum();
    return out;
  }
  Eigen::VectorXd operator()(const Poisson<double>& d) const {
    detail::check_positive(d.rate, "Poisson rate");
    Eigen::VectorXd out(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      std::poisson_distribution<long> p(detail::at(d.rate, i));
      out[static_cast<Eigen::Index>(i)] = static_cast<double>(p(rng));
    }
    return out;
  }
};

}  // namespace

Eigen::VectorXd sample(const Distribution<double>& dist, Rng& rng, std::size_t size) {
  return std::visit(Sampler{rng, size}, dist);
}

Eigen::VectorXd sample_mv_normal(const Eigen::VectorXd& mean, const SymmetricMatrix& covariance,
                                 Rng& rng) {
  if (mean.size() != covariance.dim()) {
    throw std::invalid_argument("sample_mv_normal: dimension mismatch");
  }
  const Eigen::MatrixXd lower = cholesky(covariance);
  Eigen::VectorXd z(mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  return mean + lower * z;
}

double mv_normal_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mean,
                             const SymmetricMatrix& covariance) {
  const Eigen::MatrixXd lower = cholesky(covariance);
  const Eigen::VectorXd white =
      lower.triangularView<Eigen::Lower>().solve(x - mean);
  const double d = static_cast<double>(x.size());
  return -0.5 * white.squaredNorm() - lower.diagonal().array().log().sum() -
         d * detail::kHalfLog2Pi;
}

Eigen::VectorXd sample_mv_cauchy(const Eigen::VectorXd& location, const SymmetricMatrix& a,
                                 Rng& rng) {
  if (location.size() != a.dim()) {
    throw std::invalid_argument("sample_mv_cauchy: dimension mismatch");
  }
  // A = L L^T, so L^-T z has covariance A^-1.
  const Eigen::MatrixXd lower = cholesky(a);
  Eigen::VectorXd z(location.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = standard_normal(rng);
  const double g = square(standard_normal(rng));
  const Eigen::VectorXd shaped = lower.transpose().triangularView<Eigen::Upper>().solve(z);
  return location + shaped / std::sqrt(g);
}

double mv_cauchy_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& location,
                             const SymmetricMatrix& a) {
  const Eigen::MatrixXd lower = cholesky(a);
  const double d = static_cast<double>(x.size());
  const double quad = (lower.transpose() * (x - location)).squaredNorm();
  return std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5) - 0.5 * d * std::log(std::numbers::pi) +
         lower.diagonal().array().log().sum() - 0.5 * (d + 1.0) * std::log1p(quad);
}

std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t k, Rng& rng) {
  if (k > n) throw InvalidParameter("sample_without_replacement: k exceeds n");
  std::vector<std::size_t> items(n);
  std::iota(items.begin(), items.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(items[i], items[pick(rng)]);
  }
  items.resize(k);
  return items;
}

}  // namespace nmc
