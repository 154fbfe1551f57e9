#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <variant>

#include "nmc/autodiff.hpp"
#include "nmc/distributions.hpp"
#include "nmc/linalg.hpp"
#include "nmc/random.hpp"

namespace nmc {

class DegenerateCurvature : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class InvalidScale : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class GammaInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class DirichletInvalid : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Smallest admissible Gamma/Dirichlet parameter produced by a rule.
inline constexpr double kMinProposalParameter = 1e-6;

// Gaussian parameterized by its precision P = L L^T; covariance is P^-1.
struct MvNormalProposal {
  Eigen::VectorXd mean;
  Eigen::MatrixXd precision_factor;
};

// Elliptical Cauchy with shape matrix A = L L^T (the (x-b)^T A (x-b) form).
struct MvCauchyProposal {
  Eigen::VectorXd location;
  Eigen::MatrixXd shape_factor;
};

struct GammaProposal {
  double shape = 1.0;
  double rate = 1.0;
};

// x* = x exp(scale z): log x* ~ N(log x, scale^2).
struct LogNormalProposal {
  double log_location = 0.0;
  double log_scale = 1.0;
};

struct DirichletProposal {
  Eigen::VectorXd concentration;
};

struct CategoricalProposal {
  Eigen::VectorXd probs;
};

enum class ProposalFamily { MvNormal, MvCauchy, Gamma, LogNormal, Dirichlet, Categorical };

std::string to_string(ProposalFamily family);

class Proposal {
 public:
  using Params = std::variant<MvNormalProposal, MvCauchyProposal, GammaProposal,
                              LogNormalProposal, DirichletProposal, CategoricalProposal>;

  explicit Proposal(Params params, bool fallback_used = false)
      : params_(std::move(params)), fallback_used_(fallback_used) {}

  ProposalFamily family() const;
  Support support() const;
  bool fallback_used() const { return fallback_used_; }
  const Params& params() const { return params_; }

  Eigen::VectorXd sample(Rng& rng) const;
  // Normalized log-density; -inf outside the support.
  double log_density(const Eigen::VectorXd& x) const;

  // MvNormal helpers: covariance is the inverse of the stored precision.
  Eigen::MatrixXd covariance() const;

 private:
  Params params_;
  bool fallback_used_ = false;
};

// Gaussian with mean and covariance scale^2 I.
Proposal isotropic_normal(const Eigen::VectorXd& mean, double scale, bool fallback_used = false);

// Newton-step Gaussian; falls back to the Cauchy rule and then to an
// eigenvalue-floored precision when -hess is not positive definite.
Proposal propose_real(const Eigen::VectorXd& x, const GradHess& gh, double relative_floor = 1e-8);

// Cauchy curvature match. Throws InvalidScale when the rule cannot produce a
// positive-definite shape.
Proposal propose_real_cauchy(const Eigen::VectorXd& x, const GradHess& gh);

// Gamma curvature match on the positive half-line.
Proposal propose_halfspace(double x, double grad, double hess);

// Dirichlet curvature match; gh must come from the density extended off the
// simplex through x / sum(x).
Proposal propose_simplex(const Eigen::VectorXd& x, const GradHess& gh);

}  // namespace nmc
