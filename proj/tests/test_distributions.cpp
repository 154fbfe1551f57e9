#include <algorithm>
#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/exponential.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <limits>

#include "doctest.h"
#include "nmc/autodiff.hpp"
#include "nmc/distributions.hpp"

using namespace nmc;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kDraws = 100000;

double chi2_pvalue(const std::vector<double>& observed, const std::vector<double>& expected) {
  double stat = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    stat += (observed[i] - expected[i]) * (observed[i] - expected[i]) / expected[i];
  }
  boost::math::chi_squared chi(static_cast<double>(observed.size() - 1));
  return boost::math::cdf(boost::math::complement(chi, stat));
}

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-11);
}

// 50-bin goodness of fit of draws against a density. Interior bin edges are
// sample quantiles; bin masses come from integrating the density, with the
// lowest bin taking the remaining mass.
double gof_continuous(std::vector<double> draws, const std::function<double(double)>& pdf) {
  constexpr int kBins = 50;
  std::sort(draws.begin(), draws.end());
  std::vector<double> edges;
  for (int k = 1; k < kBins; ++k) edges.push_back(draws[draws.size() * k / kBins]);
  std::vector<double> observed(kBins, 0.0), expected(kBins, 0.0);
  for (double v : draws) {
    const auto bin = std::upper_bound(edges.begin(), edges.end(), v) - edges.begin();
    observed[static_cast<std::size_t>(bin)] += 1.0;
  }
  double upper_mass = 0.0;
  for (int k = 1; k < kBins - 1; ++k) {
    expected[k] = integrate(pdf, edges[k - 1], edges[k]);
    upper_mass += expected[k];
  }
  expected[kBins - 1] = integrate(pdf, edges.back(), kInf);
  upper_mass += expected[kBins - 1];
  expected[0] = 1.0 - upper_mass;
  for (double& e : expected) e *= static_cast<double>(draws.size());
  return chi2_pvalue(observed, expected);
}

std::vector<double> draw_scalars(const Distribution<double>& d, Rng& rng) {
  const Eigen::VectorXd v = sample(d, rng, kDraws);
  return {v.data(), v.data() + v.size()};
}

std::function<double(double)> density_of(const Distribution<double>& d) {
  return [d](double x) { return std::exp(log_density(d, std::span<const double>(&x, 1))); };
}

double ld1(const Distribution<double>& d, double x) {
  return log_density(d, std::span<const double>(&x, 1));
}

template <class Dist>
double boost_logpdf(const Dist& dist, double x) {
  return std::log(boost::math::pdf(dist, x));
}

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    worst = std::max(worst, std::abs(double(i) / a.size() - double(j) / b.size()));
  }
  return worst;
}

}  // namespace

TEST_CASE("reference log-density values") {
  CHECK(ld1(normal(0.0, 1.0), 0.0) == doctest::Approx(-0.9189385332046727).epsilon(1e-15));
  CHECK(ld1(gamma(2.0, 3.0), 1.0) == doctest::Approx(std::log(9.0) - 3.0).epsilon(1e-14));
  CHECK(ld1(gamma(2.0, 3.0), 1.0) ==
        doctest::Approx(boost_logpdf(boost::math::gamma_distribution<>(2.0, 1.0 / 3.0), 1.0))
            .epsilon(1e-13));
  const Distribution<double> flat = Dirichlet<double>{{1.0, 1.0, 1.0}};
  Eigen::VectorXd p(3);
  p << 0.2, 0.5, 0.3;
  CHECK(log_density(flat, p) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  p << 0.01, 0.01, 0.98;
  CHECK(log_density(flat, p) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("log-densities agree with an independent implementation") {
  for (double x : {-3.1, -0.4, 0.0, 0.7, 2.9}) {
    CHECK(ld1(normal(0.5, 1.7), x) ==
          doctest::Approx(boost_logpdf(boost::math::normal(0.5, 1.7), x)).epsilon(1e-12));
    const Distribution<double> t = StudentT<double>{{3.5}, {0.3}, {1.4}};
    const double z = (x - 0.3) / 1.4;
    CHECK(ld1(t, x) == doctest::Approx(boost_logpdf(boost::math::students_t(3.5), z) -
                                       std::log(1.4))
                           .epsilon(1e-12));
  }
  for (double x : {0.01, 0.3, 1.0, 4.2}) {
    CHECK(ld1(gamma(0.7, 2.5), x) ==
          doctest::Approx(boost_logpdf(boost::math::gamma_distribution<>(0.7, 0.4), x))
              .epsilon(1e-12));
    const Distribution<double> e = Exponential<double>{{1.3}};
    CHECK(ld1(e, x) ==
          doctest::Approx(boost_logpdf(boost::math::exponential(1.3), x)).epsilon(1e-12));
  }
  for (double k : {0.0, 1.0, 4.0, 11.0}) {
    const Distribution<double> po = Poisson<double>{{3.3}};
    CHECK(ld1(po, k) ==
          doctest::Approx(boost_logpdf(boost::math::poisson(3.3), k)).epsilon(1e-12));
  }
  // K = 2 Dirichlet is a Beta on the first coordinate
  const Distribution<double> beta2 = Dirichlet<double>{{2.5, 0.8}};
  Eigen::VectorXd p(2);
  p << 0.35, 0.65;
  CHECK(log_density(beta2, p) ==
        doctest::Approx(boost_logpdf(boost::math::beta_distribution<>(2.5, 0.8), 0.35))
            .epsilon(1e-12));
  // Bernoulli by logits
  const Distribution<double> b = Bernoulli<double>{{0.8}};
  CHECK(ld1(b, 1.0) == doctest::Approx(std::log(1.0 / (1.0 + std::exp(-0.8)))).epsilon(1e-14));
  CHECK(ld1(b, 0.0) == doctest::Approx(std::log(1.0 / (1.0 + std::exp(0.8)))).epsilon(1e-14));
  const Distribution<double> c = Categorical<double>{{0.2, 0.5, 0.3}, 3};
  CHECK(ld1(c, 1.0) == doctest::Approx(std::log(0.5)).epsilon(1e-15));
}

TEST_CASE("vector values broadcast scalar parameters") {
  const Distribution<double> d = Normal<double>{{1.0}, {2.0, 3.0}};
  Eigen::VectorXd x(2);
  x << 0.0, 4.0;
  CHECK(log_density(d, x) ==
        doctest::Approx(ld1(normal(1.0, 2.0), 0.0) + ld1(normal(1.0, 3.0), 4.0)));
  const Distribution<double> bad = Normal<double>{{1.0, 2.0, 3.0}, {1.0}};
  CHECK_THROWS_AS(log_density(bad, x), InvalidParameter);
}

TEST_CASE("log_density is -inf exactly outside the support") {
  CHECK(ld1(gamma(2.0, 1.0), 0.0) == -kInf);
  CHECK(ld1(gamma(2.0, 1.0), -1.0) == -kInf);
  CHECK(std::isfinite(ld1(gamma(2.0, 1.0), 1e-300)));
  const Distribution<double> e = Exponential<double>{{1.0}};
  CHECK(ld1(e, -0.5) == -kInf);
  const Distribution<double> b = Bernoulli<double>{{0.0}};
  CHECK(ld1(b, 0.5) == -kInf);
  CHECK(ld1(b, 2.0) == -kInf);
  const Distribution<double> c = Categorical<double>{{0.5, 0.5}, 2};
  CHECK(ld1(c, 2.0) == -kInf);
  CHECK(ld1(c, -1.0) == -kInf);
  const Distribution<double> po = Poisson<double>{{1.0}};
  CHECK(ld1(po, 1.5) == -kInf);
  CHECK(ld1(po, -1.0) == -kInf);
  const Distribution<double> dir = Dirichlet<double>{{1.0, 2.0}};
  Eigen::VectorXd p(2);
  p << 0.5, 0.6;
  CHECK(log_density(dir, p) == -kInf);
  p << 0.0, 1.0;
  CHECK(log_density(dir, p) == -kInf);
  Eigen::VectorXd q(3);
  q << 0.2, 0.3, 0.5;
  CHECK(log_density(dir, q) == -kInf);
}

TEST_CASE("parameter errors are distinct from support errors") {
  CHECK_THROWS_AS(ld1(normal(0.0, 0.0), 1.0), InvalidParameter);
  CHECK_THROWS_AS(ld1(gamma(-1.0, 1.0), 1.0), InvalidParameter);
  const Distribution<double> t = StudentT<double>{{0.0}, {0.0}, {1.0}};
  CHECK_THROWS_AS(ld1(t, 1.0), InvalidParameter);
  const Distribution<double> c = Categorical<double>{{0.5, 0.6}, 2};
  CHECK_THROWS_AS(ld1(c, 1.0), InvalidParameter);
  const Distribution<double> dir = Dirichlet<double>{{1.0, 0.0}};
  Eigen::VectorXd p(2);
  p << 0.5, 0.5;
  CHECK_THROWS_AS(log_density(dir, p), InvalidParameter);
}

TEST_CASE("support tags") {
  CHECK(support_of(normal(0.0, 1.0)) == Support::real());
  CHECK(support_of(gamma(1.0, 1.0)) == Support::positive());
  CHECK(support_of(Distribution<double>(Exponential<double>{{1.0}})) == Support::positive());
  CHECK(support_of(Distribution<double>(Dirichlet<double>{{1.0, 1.0, 1.0}})) ==
        Support::simplex(3));
  CHECK(support_of(Distribution<double>(Categorical<double>{{0.5, 0.5}, 2})) ==
        Support::categorical(2));
  CHECK(support_of(Distribution<double>(Bernoulli<double>{{0.0}})) == Support::categorical(2));
  CHECK(support_of(Distribution<double>(Poisson<double>{{1.0}})) ==
        Support::nonnegative_integer());
}

TEST_CASE("sample basics") {
  Rng rng = make_rng(1);
  const Distribution<double> degenerate = Categorical<double>{{1.0, 0.0, 0.0}, 3};
  for (int i = 0; i < 1000; ++i) CHECK(sample(degenerate, rng, 1)[0] == 0.0);

  const auto g = draw_scalars(gamma(2.0, 3.0), rng);
  double mean = 0.0;
  for (double v : g) mean += v;
  mean /= g.size();
  const double se = std::sqrt(2.0 / 9.0 / g.size());
  CHECK(std::abs(mean - 2.0 / 3.0) < 3 * se);

  const Distribution<double> dir = Dirichlet<double>{{2.0, 3.0, 4.0}};
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = sample(dir, rng, 3);
    CHECK(std::abs(x.sum() - 1.0) <= 1e-12);
    CHECK(x.minCoeff() > 0.0);
  }
  const Distribution<double> sparse = Dirichlet<double>{{0.01, 0.01, 0.01}};
  for (int i = 0; i < 1000; ++i) {
    const Eigen::VectorXd x = sample(sparse, rng, 3);
    CHECK(Support::simplex(3).contains({x.data(), 3}));
  }
}

TEST_CASE("samplers are reproducible") {
  Rng a = make_rng(99), b = make_rng(99);
  const Distribution<double> t = StudentT<double>{{2.0}, {0.0}, {1.0}};
  CHECK(sample(t, a, 50) == sample(t, b, 50));
  const Distribution<double> dir = Dirichlet<double>{{0.5, 2.0}};
  CHECK(sample(dir, a, 2) == sample(dir, b, 2));
}

TEST_CASE("continuous samplers fit their densities") {
  Rng rng = make_rng(2024);
  const std::vector<std::pair<const char*, Distribution<double>>> cases{
      {"normal", normal(1.0, 2.0)},
      {"gamma", gamma(2.0, 3.0)},
      {"gamma small shape", gamma(0.3, 1.5)},
      {"exponential", Exponential<double>{{0.7}}},
      {"student-t", StudentT<double>{{2.5}, {-1.0}, {0.5}}},
  };
  for (const auto& [name, dist] : cases) {
    CAPTURE(name);
    CHECK(gof_continuous(draw_scalars(dist, rng), density_of(dist)) > 0.001);
  }
}

TEST_CASE("dirichlet marginals fit their beta densities") {
  Rng rng = make_rng(77);
  const std::vector<double> alpha{0.6, 2.0, 4.5};
  const Distribution<double> dir = Dirichlet<double>{alpha};
  std::vector<std::vector<double>> coords(3);
  for (std::size_t n = 0; n < kDraws; ++n) {
    const Eigen::VectorXd x = sample(dir, rng, 3);
    for (int k = 0; k < 3; ++k) coords[k].push_back(x[k]);
  }
  for (int k = 0; k < 3; ++k) {
    boost::math::beta_distribution<> marginal(alpha[k], 7.1 - alpha[k]);
    CHECK(gof_continuous(coords[k], [&](double v) {
            return v >= 1.0 ? 0.0 : boost::math::pdf(marginal, v);
          }) > 0.001);
  }
}

TEST_CASE("discrete samplers fit their mass functions") {
  Rng rng = make_rng(5);
  SUBCASE("categorical") {
    const Distribution<double> c = Categorical<double>{{0.1, 0.25, 0.4, 0.25}, 4};
    const auto v = draw_scalars(c, rng);
    std::vector<double> obs(4, 0.0), exp(4);
    for (double x : v) obs[static_cast<std::size_t>(x)] += 1;
    for (int k = 0; k < 4; ++k) exp[k] = kDraws * std::exp(ld1(c, k));
    CHECK(chi2_pvalue(obs, exp) > 0.001);
  }
  SUBCASE("bernoulli") {
    const Distribution<double> b = Bernoulli<double>{{-0.6}};
    const auto v = draw_scalars(b, rng);
    std::vector<double> obs(2, 0.0), exp(2);
    for (double x : v) obs[static_cast<std::size_t>(x)] += 1;
    for (int k = 0; k < 2; ++k) exp[k] = kDraws * std::exp(ld1(b, k));
    CHECK(chi2_pvalue(obs, exp) > 0.001);
  }
  SUBCASE("poisson") {
    const Distribution<double> po = Poisson<double>{{3.3}};
    const auto v = draw_scalars(po, rng);
    constexpr int kTop = 12;  // last bin pools the tail
    std::vector<double> obs(kTop + 1, 0.0), exp(kTop + 1, 0.0);
    for (double x : v) obs[std::min<std::size_t>(static_cast<std::size_t>(x), kTop)] += 1;
    double head = 0.0;
    for (int k = 0; k < kTop; ++k) {
      exp[k] = std::exp(ld1(po, k));
      head += exp[k];
    }
    exp[kTop] = 1.0 - head;
    for (double& e : exp) e *= kDraws;
    CHECK(chi2_pvalue(obs, exp) > 0.001);
  }
}

TEST_CASE("multivariate normal") {
  Rng rng = make_rng(8);
  SUBCASE("identity covariance") {
    const Eigen::VectorXd mean = Eigen::VectorXd::Zero(3);
    const SymmetricMatrix cov(Eigen::MatrixXd::Identity(3, 3));
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(3, 3);
    for (std::size_t n = 0; n < kDraws; ++n) {
      const Eigen::VectorXd x = sample_mv_normal(mean, cov, rng);
      acc += x * x.transpose();
    }
    acc /= double(kDraws);
    CHECK((acc - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 0.05);
  }
  SUBCASE("marginal scales") {
    Eigen::VectorXd mean(2);
    mean << 1, 2;
    Eigen::MatrixXd c(2, 2);
    c << 4, 0, 0, 9;
    const SymmetricMatrix cov(c);
    std::vector<double> a, b;
    for (std::size_t n = 0; n < kDraws; ++n) {
      const Eigen::VectorXd x = sample_mv_normal(mean, cov, rng);
      a.push_back(x[0]);
      b.push_back(x[1]);
    }
    auto sd = [](const std::vector<double>& v, double m) {
      double s = 0.0;
      for (double x : v) s += (x - m) * (x - m);
      return std::sqrt(s / v.size());
    };
    CHECK(std::abs(sd(a, 1.0) - 2.0) < 3 * 2.0 / std::sqrt(2.0 * kDraws));
    CHECK(std::abs(sd(b, 2.0) - 3.0) < 3 * 3.0 / std::sqrt(2.0 * kDraws));
  }
  SUBCASE("projection fits its normal density") {
    Eigen::VectorXd mean(3);
    mean << 0.5, -1.0, 2.0;
    Eigen::MatrixXd c(3, 3);
    c << 2.0, 0.3, -0.4, 0.3, 1.0, 0.2, -0.4, 0.2, 0.5;
    const SymmetricMatrix cov(c);
    Eigen::VectorXd u(3);
    u << 0.6, -0.8, 1.1;
    std::vector<double> proj;
    for (std::size_t n = 0; n < kDraws; ++n) proj.push_back(u.dot(sample_mv_normal(mean, cov, rng)));
    boost::math::normal marginal(u.dot(mean), std::sqrt(u.dot(c * u)));
    CHECK(gof_continuous(proj, [&](double v) { return boost::math::pdf(marginal, v); }) > 0.001);
    // density against the closed form
    Eigen::VectorXd x(3);
    x << 0.1, 0.2, 0.3;
    const Eigen::VectorXd r = x - mean;
    const double expected = -0.5 * r.dot(c.inverse() * r) - 0.5 * std::log(c.determinant()) -
                            1.5 * std::log(2 * M_PI);
    CHECK(mv_normal_log_density(x, mean, cov) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("near-degenerate covariance stays at the mean") {
    Eigen::VectorXd mean(2);
    mean << 3.0, -1.0;
    const SymmetricMatrix cov(1e-12 * Eigen::MatrixXd::Identity(2, 2));
    for (int n = 0; n < 100; ++n) {
      CHECK((sample_mv_normal(mean, cov, rng) - mean).cwiseAbs().maxCoeff() < 1e-5);
    }
  }
}

TEST_CASE("multivariate cauchy") {
  Rng rng = make_rng(31);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const SymmetricMatrix unit(Eigen::MatrixXd::Identity(1, 1));
  std::vector<double> base;
  for (std::size_t n = 0; n < kDraws; ++n) base.push_back(sample_mv_cauchy(zero, unit, rng)[0]);
  SUBCASE("quartiles") {
    std::vector<double> s = base;
    std::sort(s.begin(), s.end());
    const double median = s[s.size() / 2];
    const double iqr = s[3 * s.size() / 4] - s[s.size() / 4];
    CHECK(std::abs(median) < 0.05);
    CHECK(std::abs(iqr - 2.0) < 0.1);
  }
  SUBCASE("location shift") {
    const Eigen::VectorXd five = Eigen::VectorXd::Constant(1, 5.0);
    std::vector<double> shifted;
    for (std::size_t n = 0; n < kDraws; ++n) {
      shifted.push_back(sample_mv_cauchy(five, unit, rng)[0] - 5.0);
    }
    const double critical = 1.628 * std::sqrt(2.0 / kDraws);
    CHECK(ks_statistic(base, shifted) < critical);
  }
  SUBCASE("reproducible") {
    Rng a = make_rng(4), b = make_rng(4);
    CHECK(sample_mv_cauchy(zero, unit, a) == sample_mv_cauchy(zero, unit, b));
  }
  SUBCASE("density is the standard elliptical cauchy") {
    // 1-D: A = 1 / scale^2
    const double scale = 0.7;
    const SymmetricMatrix a(Eigen::MatrixXd::Constant(1, 1, 1.0 / (scale * scale)));
    const Eigen::VectorXd loc = Eigen::VectorXd::Constant(1, 1.5);
    boost::math::cauchy_distribution<> ref(1.5, scale);
    for (double v : {-2.0, 1.5, 3.0}) {
      CHECK(mv_cauchy_log_density(Eigen::VectorXd::Constant(1, v), loc, a) ==
            doctest::Approx(boost_logpdf(ref, v)).epsilon(1e-12));
    }
    std::vector<double> draws;
    for (std::size_t n = 0; n < kDraws; ++n) draws.push_back(sample_mv_cauchy(loc, a, rng)[0]);
    CHECK(gof_continuous(draws, [&](double v) { return boost::math::pdf(ref, v); }) > 0.001);
  }
  SUBCASE("2-D projection and normalization") {
    Eigen::MatrixXd am(2, 2);
    am << 2.0, 0.5, 0.5, 1.0;
    const SymmetricMatrix a(am);
    Eigen::VectorXd loc(2);
    loc << 1.0, -1.0;
    Eigen::VectorXd u(2);
    u << 0.3, 0.9;
    std::vector<double> proj;
    for (std::size_t n = 0; n < kDraws; ++n) proj.push_back(u.dot(sample_mv_cauchy(loc, a, rng)));
    boost::math::cauchy_distribution<> ref(u.dot(loc), std::sqrt(u.dot(am.inverse() * u)));
    CHECK(gof_continuous(proj, [&](double v) { return boost::math::pdf(ref, v); }) > 0.001);
    // integrates to one: polar coordinates around the location
    const double mass = integrate(
        [&](double r) {
          return integrate(
              [&](double th) {
                Eigen::VectorXd x(2);
                x << loc[0] + r * std::cos(th), loc[1] + r * std::sin(th);
                return r * std::exp(mv_cauchy_log_density(x, loc, a));
              },
              0.0, 2 * M_PI);
        },
        0.0, kInf);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("sample_without_replacement") {
  Rng rng = make_rng(3);
  for (int rep = 0; rep < 100; ++rep) {
    auto pick = sample_without_replacement(20, 7, rng);
    CHECK(pick.size() == 7);
    std::sort(pick.begin(), pick.end());
    CHECK(std::adjacent_find(pick.begin(), pick.end()) == pick.end());
    CHECK(pick.back() < 20);
  }
  CHECK_THROWS(sample_without_replacement(3, 4, rng));
  // every index equally likely to be chosen
  std::vector<double> counts(5, 0.0);
  for (int rep = 0; rep < 50000; ++rep) {
    for (auto i : sample_without_replacement(5, 2, rng)) counts[i] += 1;
  }
  CHECK(chi2_pvalue(counts, std::vector<double>(5, 20000.0)) > 0.001);
}

TEST_CASE("every log-density differentiates at interior points") {
  auto run = [](auto&& f, double at) {
    Eigen::VectorXd x(1);
    x << at;
    return evaluate_with_derivatives(f, x);
  };
  const double y = 0.8;
  const std::span<const double> obs(&y, 1);
  CHECK_NOTHROW(run([&](std::span<const Dual> v) {
    return log_density(Distribution<Dual>(Normal<Dual>{{v[0]}, {Dual(1.0)}}), obs);
  }, 0.3));
  CHECK_NOTHROW(run([&](std::span<const Dual> v) {
    return log_density(Distribution<Dual>(Gamma<Dual>{{v[0]}, {v[0]}}), obs);
  }, 1.3));
  CHECK_NOTHROW(run([&](std::span<const Dual> v) {
    return log_density(Distribution<Dual>(Exponential<Dual>{{v[0]}}), obs);
  }, 1.3));
  CHECK_NOTHROW(run([&](std::span<const Dual> v) {
    return log_density(Distribution<Dual>(StudentT<Dual>{{v[0]}, {Dual(0.0)}, {v[0]}}), obs);
  }, 2.5));
  const double label = 1.0;
  CHECK_NOTHROW(run([&](std::span<const Dual> v) {
    return log_density(Distribution<Dual>(Bernoulli<Dual>{{v[0]}}),
                       std::span<const double>(&label, 1));
  }, 0.2));
  CHECK_NOTHROW(run([&](std::span<const Dual> v) {
    return log_density(Distribution<Dual>(Categorical<Dual>{{v[0], 1.0 - v[0]}, 2}),
                       std::span<const double>(&label, 1));
  }, 0.2));
  const double count = 3.0;
  CHECK_NOTHROW(run([&](std::span<const Dual> v) {
    return log_density(Distribution<Dual>(Poisson<Dual>{{v[0]}}),
                       std::span<const double>(&count, 1));
  }, 2.2));
  Eigen::VectorXd simplex_point(3);
  simplex_point << 0.2, 0.3, 0.5;
  CHECK_NOTHROW(evaluate_with_derivatives(
      [](std::span<const Dual> v) {
        return log_density(Distribution<double>(Dirichlet<double>{{2.0, 3.0, 4.0}}), v);
      },
      simplex_point));
  CHECK_NOTHROW(evaluate_with_derivatives(
      [&](std::span<const Dual> v) {
        std::vector<Dual> a(v.begin(), v.end());
        return log_density(Distribution<Dual>(Dirichlet<Dual>{a}),
                           std::span<const double>(simplex_point.data(), 3));
      },
      Eigen::Vector3d(1.5, 2.0, 0.7)));
}
