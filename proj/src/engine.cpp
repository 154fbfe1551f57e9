#include "nmc/engine.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <limits>

#include "nmc/autodiff.hpp"

namespace nmc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Isotropic step used when the real-vector rules cannot be evaluated at all.
double real_fallback_scale(const Eigen::VectorXd& x) { return 0.01 * (1.0 + x.norm()); }

Proposal categorical_conditional(const BlanketScore& f, std::size_t classes) {
  Eigen::VectorXd logp(static_cast<Eigen::Index>(classes));
  Eigen::VectorXd v(1);
  for (std::size_t c = 0; c < classes; ++c) {
    v[0] = static_cast<double>(c);
    logp[static_cast<Eigen::Index>(c)] = f(v);
  }
  const double top = logp.maxCoeff();
  if (!std::isfinite(top)) {
    const auto n = static_cast<Eigen::Index>(classes);
    return Proposal(CategoricalProposal{Eigen::VectorXd::Constant(n, 1.0 / double(classes))},
                    true);
  }
  Eigen::VectorXd probs = (logp.array() - top).exp();
  probs /= probs.sum();
  return Proposal(CategoricalProposal{std::move(probs)});
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::Nmc:
      return "nmc";
    case Method::Rwm:
      return "rwm";
    case Method::Mala:
      return "mala";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  std::string lower = name;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "nmc") return Method::Nmc;
  if (lower == "rwm") return Method::Rwm;
  if (lower == "mala") return Method::Mala;
  throw std::invalid_argument("unknown method: " + name);
}

void SamplerConfig::validate() const {
  if (num_samples < 1) throw std::invalid_argument("num_samples must be at least 1");
  if (!(rwm_step > 0.0) || !(mala_step > 0.0)) {
    throw std::invalid_argument("step sizes must be positive");
  }
  if (!(eig_floor > 0.0)) throw std::invalid_argument("eig_floor must be positive");
  if (!(simplex_concentration > 0.0)) {
    throw std::invalid_argument("simplex_concentration must be positive");
  }
}

Proposal nmc_propose(const Model& model, const World& world, NodeId node,
                     const Eigen::VectorXd& at, double eig_floor) {
  const Node& n = model.node(node);
  const BlanketScore f(model, world, node);
  switch (n.support.kind) {
    case SupportKind::RealVector:
      try {
        return propose_real(at, evaluate_with_derivatives(f, at).gh, eig_floor);
      } catch (const std::runtime_error&) {
      } catch (const InvalidParameter&) {
      }
      return isotropic_normal(at, real_fallback_scale(at), true);

    case SupportKind::PositiveReal: {
      if (at.size() != 1) throw std::logic_error("nmc_propose: positive nodes must be scalar");
      try {
        const Derivatives d = evaluate_with_derivatives(f, at);
        return propose_halfspace(at[0], d.gh.grad[0], d.gh.hess(0, 0));
      } catch (const std::runtime_error&) {
      } catch (const InvalidParameter&) {
      }
      return Proposal(LogNormalProposal{std::log(at[0]), kPositiveFallbackLogScale}, true);
    }

    case SupportKind::Simplex: {
      // Differentiate the density extended off the simplex through v / sum(v).
      const auto extended = [&f](std::span<const Dual> v) {
        Dual total(0.0);
        for (const Dual& vi : v) total += vi;
        std::vector<Dual> y;
        y.reserve(v.size());
        for (const Dual& vi : v) y.push_back(vi / total);
        return f(std::span<const Dual>(y));
      };
      try {
        return propose_simplex(at, evaluate_with_derivatives(extended, at).gh);
      } catch (const std::runtime_error&) {
      } catch (const InvalidParameter&) {
      }
      return Proposal(DirichletProposal{Eigen::VectorXd::Ones(at.size())}, true);
    }

    case SupportKind::Categorical:
      if (at.size() != 1) throw std::logic_error("nmc_propose: categorical nodes must be scalar");
      return categorical_conditional(f, n.support.size);

    case SupportKind::NonNegativeInteger:
      break;
  }
  throw std::logic_error("nmc_propose: no proposer for the support of " + n.name);
}

Proposal rwm_propose(const Model& model, NodeId node, const Eigen::VectorXd& at, double step,
                     double simplex_concentration) {
  const Node& n = model.node(node);
  switch (n.support.kind) {
    case SupportKind::RealVector:
      return isotropic_normal(at, step);
    case SupportKind::PositiveReal:
      if (at.size() != 1) throw std::logic_error("rwm_propose: positive nodes must be scalar");
      return Proposal(LogNormalProposal{std::log(at[0]), step});
    case SupportKind::Simplex:
      // The floor keeps the concentration valid when a coordinate is near zero.
      return Proposal(DirichletProposal{(simplex_concentration * at).cwiseMax(1e-3)});
    case SupportKind::Categorical: {
      const auto c = static_cast<Eigen::Index>(n.support.size);
      return Proposal(CategoricalProposal{Eigen::VectorXd::Constant(c, 1.0 / double(c))});
    }
    case SupportKind::NonNegativeInteger:
      break;
  }
  throw std::logic_error("rwm_propose: no proposer for the support of " + n.name);
}

Proposal mala_propose(const Model& model, const World& world, NodeId node,
                      const Eigen::VectorXd& at, double step) {
  if (model.node(node).support.kind != SupportKind::RealVector) {
    throw std::logic_error("mala_propose: node is not real-valued");
  }
  const BlanketScore f(model, world, node);
  try {
    const Derivatives d = evaluate_with_derivatives(f, at);
    return isotropic_normal(at + 0.5 * step * step * d.gh.grad, step);
  } catch (const std::runtime_error&) {
  } catch (const InvalidParameter&) {
  }
  return isotropic_normal(at, step, true);
}

ProposalFn make_proposer(const Model& model, const SamplerConfig& config) {
  const SamplerConfig c = config;
  switch (c.method) {
    case Method::Nmc:
      return [&model, c](const World& w, NodeId n, const Eigen::VectorXd& at) {
        return nmc_propose(model, w, n, at, c.eig_floor);
      };
    case Method::Rwm:
      return [&model, c](const World&, NodeId n, const Eigen::VectorXd& at) {
        return rwm_propose(model, n, at, c.rwm_step, c.simplex_concentration);
      };
    case Method::Mala:
      return [&model, c](const World& w, NodeId n, const Eigen::VectorXd& at) {
        if (model.node(n).support.kind == SupportKind::RealVector) {
          return mala_propose(model, w, n, at, c.mala_step);
        }
        return rwm_propose(model, n, at, c.rwm_step, c.simplex_concentration);
      };
  }
  throw std::logic_error("make_proposer: unknown method");
}

StepResult mh_step(const Model& model, World& world, NodeId node, const ProposalFn& propose,
                   Rng& rng) {
  StepResult result;
  const Eigen::VectorXd& current = world.value(node);
  const Proposal forward = propose(world, node, current);
  result.fallback = forward.fallback_used();
  Eigen::VectorXd candidate = forward.sample(rng);

  Move move;
  try {
    move = prepare_move(model, world, node, candidate);
  } catch (const OutOfSupport&) {
    result.log_ratio = kNegInf;
    return result;
  }
  const Proposal reverse = propose(world, node, candidate);
  double log_ratio =
      move.delta + reverse.log_density(current) - forward.log_density(candidate);
  if (std::isnan(log_ratio)) log_ratio = kNegInf;
  result.log_ratio = log_ratio;
  result.accept_prob = log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
  if (std::log(uniform01(rng)) < log_ratio) {
    world.commit(std::move(move));
    result.accepted = true;
  }
  return result;
}

std::size_t Trace::index(const std::string& name) const {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw std::out_of_range("trace has no node " + name);
  return static_cast<std::size_t>(it - names.begin());
}

World Trace::world_at(const Model& model, std::size_t t) const {
  std::vector<Eigen::VectorXd> values(model.size());
  for (NodeId id = 0; id < model.size(); ++id) {
    if (model.node(id).is_observed()) values[id] = *model.node(id).observed;
  }
  for (std::size_t k = 0; k < nodes.size(); ++k) values[nodes[k]] = samples[k].row(t);
  return make_world(model, std::move(values));
}

Trace run(const Model& model, const SamplerConfig& config) {
  config.validate();
  Rng rng = make_rng(config.seed);
  World world = init_world(model, rng);
  return run_from(model, std::move(world), config, rng);
}

Trace run(const Model& model, const Observations& observations, const SamplerConfig& config) {
  return run(model.with_observations(observations), config);
}

Trace run_from(const Model& model, World world, const SamplerConfig& config, Rng& rng,
               const StepCallback& on_step) {
  config.validate();
  using Clock = std::chrono::steady_clock;
  const std::size_t n = config.num_samples;

  Trace trace;
  trace.nodes = model.latent();
  const std::size_t latent = trace.nodes.size();
  for (NodeId id : trace.nodes) {
    trace.names.push_back(model.node(id).name);
    trace.samples.emplace_back(static_cast<Eigen::Index>(n),
                               static_cast<Eigen::Index>(model.node(id).dim));
  }
  trace.stats.assign(latent, NodeStats{});
  trace.log_prob.reserve(n);
  trace.seconds.reserve(n);

  const ProposalFn propose = make_proposer(model, config);
  std::vector<std::size_t> order(latent);
  for (std::size_t k = 0; k < latent; ++k) order[k] = k;
  std::size_t accepted = 0;
  std::size_t fallbacks = 0;

  const auto start = Clock::now();
  for (std::size_t t = 0; t < n; ++t) {
    if (config.random_scan) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t k : order) {
      const StepResult r = mh_step(model, world, trace.nodes[k], propose, rng);
      NodeStats& s = trace.stats[k];
      ++s.proposals;
      s.accepted += r.accepted ? 1 : 0;
      s.fallbacks += r.fallback ? 1 : 0;
      s.min_accept_prob = std::min(s.min_accept_prob, r.accept_prob);
      accepted += r.accepted ? 1 : 0;
      fallbacks += r.fallback ? 1 : 0;
      if (on_step) on_step(trace.nodes[k], r);
    }
    const auto row = static_cast<Eigen::Index>(t);
    for (std::size_t k = 0; k < latent; ++k) {
      trace.samples[k].row(row) = world.value(trace.nodes[k]).transpose();
    }
    trace.log_prob.push_back(world.log_prob());
    trace.seconds.push_back(std::chrono::duration<double>(Clock::now() - start).count());
    trace.accepted.push_back(accepted);
    trace.proposals.push_back((t + 1) * latent);
    trace.fallbacks.push_back(fallbacks);
  }
  return trace;
}

}  // namespace nmc
