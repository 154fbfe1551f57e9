#include "nmc/proposers.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace nmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log-density of N(mean, P^-1) with P = L L^T
double normal_precision_log_density(const Eigen::VectorXd& x, const MvNormalProposal& p) {
  const double d = static_cast<double>(x.size());
  const double quad = (p.precision_factor.transpose() * (x - p.mean)).squaredNorm();
  return -0.5 * quad + p.precision_factor.diagonal().array().log().sum() -
         d * detail::kHalfLog2Pi;
}

Eigen::VectorXd standard_normal_vector(Eigen::Index d, Rng& rng) {
  Eigen::VectorXd z(d);
  for (Eigen::Index i = 0; i < d; ++i) z[i] = standard_normal(rng);
  return z;
}

Proposal normal_from_precision(const Eigen::VectorXd& x, const Eigen::VectorXd& grad,
                               const SymmetricMatrix& precision, bool fallback_used) {
  const Eigen::MatrixXd factor = cholesky(precision);
  // Newton step: solve(-hess, grad) through the factor, never an inverse.
  Eigen::VectorXd mean = x + cholesky_solve(factor, grad);
  if (!mean.allFinite()) throw DegenerateCurvature("Newton step is not finite");
  return Proposal(MvNormalProposal{std::move(mean), factor}, fallback_used);
}

}  // namespace

std::string to_string(ProposalFamily family) {
  switch (family) {
    case ProposalFamily::MvNormal:
      return "mv_normal";
    case ProposalFamily::MvCauchy:
      return "mv_cauchy";
    case ProposalFamily::Gamma:
      return "gamma";
    case ProposalFamily::LogNormal:
      return "log_normal";
    case ProposalFamily::Dirichlet:
      return "dirichlet";
    case ProposalFamily::Categorical:
      return "categorical";
  }
  return "unknown";
}

ProposalFamily Proposal::family() const {
  return static_cast<ProposalFamily>(params_.index());
}

Support Proposal::support() const {
  struct Visitor {
    Support operator()(const MvNormalProposal&) const { return Support::real(); }
    Support operator()(const MvCauchyProposal&) const { return Support::real(); }
    Support operator()(const GammaProposal&) const { return Support::positive(); }
    Support operator()(const LogNormalProposal&) const { return Support::positive(); }
    Support operator()(const DirichletProposal& p) const {
      return Support::simplex(static_cast<std::size_t>(p.concentration.size()));
    }
    Support operator()(const CategoricalProposal& p) const {
      return Support::categorical(static_cast<std::size_t>(p.probs.size()));
    }
  };
  return std::visit(Visitor{}, params_);
}

Eigen::VectorXd Proposal::sample(Rng& rng) const {
  struct Visitor {
    Rng& rng;
    Eigen::VectorXd operator()(const MvNormalProposal& p) const {
      const Eigen::VectorXd z = standard_normal_vector(p.mean.size(), rng);
      return p.mean + p.precision_factor.transpose().triangularView<Eigen::Upper>().solve(z);
    }
    Eigen::VectorXd operator()(const MvCauchyProposal& p) const {
      const Eigen::VectorXd z = standard_normal_vector(p.location.size(), rng);
      const double g = square(standard_normal(rng));
      return p.location +
             p.shape_factor.transpose().triangularView<Eigen::Upper>().solve(z) / std::sqrt(g);
    }
    Eigen::VectorXd operator()(const GammaProposal& p) const {
      Eigen::VectorXd out(1);
      out[0] = std::max(gamma_draw(p.shape, p.rate, rng), std::numeric_limits<double>::min());
      return out;
    }
    Eigen::VectorXd operator()(const LogNormalProposal& p) const {
      Eigen::VectorXd out(1);
      out[0] = std::exp(p.log_location + p.log_scale * standard_normal(rng));
      return out;
    }
    Eigen::VectorXd operator()(const DirichletProposal& p) const {
      Dirichlet<double> d;
      d.concentration.assign(p.concentration.data(),
                             p.concentration.data() + p.concentration.size());
      return nmc::sample(Distribution<double>(d), rng,
                         static_cast<std::size_t>(p.concentration.size()));
    }
    Eigen::VectorXd operator()(const CategoricalProposal& p) const {
      Categorical<double> c;
      c.probs.assign(p.probs.data(), p.probs.data() + p.probs.size());
      c.classes = static_cast<std::size_t>(p.probs.size());
      return nmc::sample(Distribution<double>(c), rng, 1);
    }
  };
  return std::visit(Visitor{rng}, params_);
}

double Proposal::log_density(const Eigen::VectorXd& x) const {
  struct Visitor {
    const Eigen::VectorXd& x;
    double operator()(const MvNormalProposal& p) const {
      if (x.size() != p.mean.size() || !x.allFinite()) return kNegInf;
      return normal_precision_log_density(x, p);
    }
    double operator()(const MvCauchyProposal& p) const {
      if (x.size() != p.location.size() || !x.allFinite()) return kNegInf;
      const double d = static_cast<double>(x.size());
      const double quad = (p.shape_factor.transpose() * (x - p.location)).squaredNorm();
      return std::lgamma(0.5 * (d + 1.0)) - std::lgamma(0.5) -
             0.5 * d * std::log(std::numbers::pi) +
             p.shape_factor.diagonal().array().log().sum() - 0.5 * (d + 1.0) * std::log1p(quad);
    }
    double operator()(const GammaProposal& p) const {
      if (x.size() != 1) return kNegInf;
      return nmc::log_density(Distribution<double>(Gamma<double>{{p.shape}, {p.rate}}), x);
    }
    double operator()(const LogNormalProposal& p) const {
      if (x.size() != 1 || !(x[0] > 0.0)) return kNegInf;
      const double lx = std::log(x[0]);
      const double z = (lx - p.log_location) / p.log_scale;
      return -0.5 * z * z - std::log(p.log_scale) - detail::kHalfLog2Pi - lx;
    }
    double operator()(const DirichletProposal& p) const {
      Dirichlet<double> d;
      d.concentration.assign(p.concentration.data(),
                             p.concentration.data() + p.concentration.size());
      return nmc::log_density(Distribution<double>(d), x);
    }
    double operator()(const CategoricalProposal& p) const {
      if (x.size() != 1) return kNegInf;
      const double v = x[0];
      if (!detail::is_index(v, static_cast<double>(p.probs.size()))) return kNegInf;
      return std::log(p.probs[static_cast<Eigen::Index>(v)]);
    }
  };
  return std::visit(Visitor{x}, params_);
}

Eigen::MatrixXd Proposal::covariance() const {
  const auto* p = std::get_if<MvNormalProposal>(&params_);
  if (p == nullptr) throw std::logic_error("covariance: not a Gaussian proposal");
  const Eigen::Index d = p->mean.size();
  // P^-1 = L^-T L^-1
  const Eigen::MatrixXd inv_factor =
      p->precision_factor.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
  return inv_factor.transpose() * inv_factor;
}

Proposal isotropic_normal(const Eigen::VectorXd& mean, double scale, bool fallback_used) {
  if (!(scale > 0.0)) throw std::invalid_argument("isotropic_normal: scale must be positive");
  const Eigen::Index d = mean.size();
  Eigen::MatrixXd factor = Eigen::MatrixXd::Identity(d, d) / scale;
  return Proposal(MvNormalProposal{mean, std::move(factor)}, fallback_used);
}

Proposal propose_real(const Eigen::VectorXd& x, const GradHess& gh, double relative_floor) {
  if (gh.dim() != x.size() || gh.hess.rows() != x.size() || gh.hess.cols() != x.size()) {
    throw std::invalid_argument("propose_real: derivative dimensions do not match x");
  }
  const SymmetricMatrix neg_hess(-gh.hess);
  EigenDecomposition eig;
  try {
    eig = eig_sym(neg_hess);
  } catch (const NoConvergence&) {
    return propose_real_cauchy(x, gh);
  }
  const double floor = default_eig_floor(eig, relative_floor);
  if (eig.values.minCoeff() >= floor) {
    try {
      return normal_from_precision(x, gh.grad, neg_hess, false);
    } catch (const std::runtime_error&) {
      // numerically PD but the factorization disagreed; handled below
    }
  }
  try {
    return propose_real_cauchy(x, gh);
  } catch (const InvalidScale&) {
  }
  try {
    return normal_from_precision(x, gh.grad, repair_psd(neg_hess, floor), true);
  } catch (const std::runtime_error& e) {
    throw DegenerateCurvature(std::string("propose_real: no valid proposal: ") + e.what());
  }
}

Proposal propose_real_cauchy(const Eigen::VectorXd& x, const GradHess& gh) {
  if (gh.dim() != x.size()) {
    throw std::invalid_argument("propose_real_cauchy: derivative dimensions do not match x");
  }
  const Eigen::VectorXd& g = gh.grad;
  const SymmetricMatrix m(gh.hess - g * g.transpose());
  Eigen::VectorXd w;
  try {
    w = solve(m, g);
  } catch (const std::runtime_error& e) {
    throw InvalidScale(std::string("propose_real_cauchy: ") + e.what());
  }
  // With t = g^T (H - g g^T)^-1 g, Sherman-Morrison gives s = g^T H^-1 g =
  // t / (1 + t) and (s - 1) / (2 - s) = -1 / (2 + t). The second form stays
  // defined when H itself is singular.
  const double t = g.dot(w);
  // 2 - s = (2 + t) / (1 + t)
  if (std::abs(2.0 + t) < 1e-8 * std::abs(1.0 + t)) {
    throw InvalidScale("propose_real_cauchy: s too close to 2");
  }
  const double factor = -1.0 / (2.0 + t);
  Eigen::MatrixXd shape_factor;
  try {
    shape_factor = cholesky(SymmetricMatrix(m.matrix() * factor));
  } catch (const NotPositiveDefinite&) {
    throw InvalidScale("propose_real_cauchy: shape matrix is not positive definite");
  }
  Eigen::VectorXd location = x - w;
  if (!location.allFinite() || !shape_factor.allFinite()) {
    throw InvalidScale("propose_real_cauchy: non-finite parameters");
  }
  return Proposal(MvCauchyProposal{std::move(location), std::move(shape_factor)});
}

Proposal propose_halfspace(double x, double grad, double hess) {
  if (!(x > 0.0)) throw std::invalid_argument("propose_halfspace: x must be positive");
  const double shape = 1.0 - x * x * hess;
  const double rate = -x * hess - grad;
  if (!(shape >= kMinProposalParameter) || !(rate >= kMinProposalParameter) ||
      !std::isfinite(shape) || !std::isfinite(rate)) {
    throw GammaInvalid("propose_halfspace: curvature gives non-positive Gamma parameters");
  }
  return Proposal(GammaProposal{shape, rate});
}

Proposal propose_simplex(const Eigen::VectorXd& x, const GradHess& gh) {
  const Eigen::Index k = x.size();
  if (k < 2) throw std::invalid_argument("propose_simplex: need K >= 2");
  if (gh.dim() != k) throw std::invalid_argument("propose_simplex: dimension mismatch");
  Eigen::VectorXd alpha(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    double off_max = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < k; ++j) {
      if (j != i) off_max = std::max(off_max, gh.hess(i, j));
    }
    alpha[i] = 1.0 - x[i] * x[i] * (gh.hess(i, i) - off_max);
    if (!(alpha[i] >= kMinProposalParameter) || !std::isfinite(alpha[i])) {
      throw DirichletInvalid("propose_simplex: curvature gives a non-positive concentration");
    }
  }
  return Proposal(DirichletProposal{std::move(alpha)});
}

}  // namespace nmc
