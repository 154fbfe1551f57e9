#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nmc/graph.hpp"
#include "nmc/proposers.hpp"

namespace nmc {

enum class Method { Nmc, Rwm, Mala };

std::string to_string(Method method);
// Accepts "nmc", "rwm", "mala" (case-insensitive).
Method parse_method(const std::string& name);

struct SamplerConfig {
  Method method = Method::Nmc;
  std::size_t num_samples = 1000;
  std::uint64_t seed = 0;
  double rwm_step = 0.5;     // sd of the Gaussian random walk; log-sd on positive nodes
  double mala_step = 0.1;    // epsilon
  double eig_floor = 1e-8;   // relative floor for the precision repair
  double simplex_concentration = 100.0;  // kappa of the Dirichlet(kappa x) random walk
  bool random_scan = false;

  void validate() const;
};

// Proposals are estimated from the node's Markov blanket, which does not
// depend on the node's own value. Evaluating at `at` on the current world is
// therefore the same as estimating in the world where the node equals `at`;
// mh_step relies on this for the reverse proposal.
Proposal nmc_propose(const Model& model, const World& world, NodeId node,
                     const Eigen::VectorXd& at, double eig_floor = 1e-8);
Proposal rwm_propose(const Model& model, NodeId node, const Eigen::VectorXd& at, double step,
                     double simplex_concentration = 100.0);
// Real-vector nodes only; make_proposer routes constrained nodes to RWM.
Proposal mala_propose(const Model& model, const World& world, NodeId node,
                      const Eigen::VectorXd& at, double step);

// Log-scale used by the NMC fallback on positive nodes.
inline constexpr double kPositiveFallbackLogScale = 0.1;

using ProposalFn = std::function<Proposal(const World&, NodeId, const Eigen::VectorXd&)>;

ProposalFn make_proposer(const Model& model, const SamplerConfig& config);

struct StepResult {
  bool accepted = false;
  double accept_prob = 0.0;
  double log_ratio = 0.0;
  bool fallback = false;  // forward proposal came from a fallback path
};

// One Metropolis-Hastings update of `node`. The reverse density comes from
// re-running `propose` at the proposed value. On rejection `world` is left
// untouched.
StepResult mh_step(const Model& model, World& world, NodeId node, const ProposalFn& propose,
                   Rng& rng);

struct NodeStats {
  std::size_t proposals = 0;
  std::size_t accepted = 0;
  std::size_t fallbacks = 0;
  double min_accept_prob = 1.0;
};

struct Trace {
  std::vector<NodeId> nodes;         // latent nodes in sweep order
  std::vector<std::string> names;
  std::vector<Eigen::MatrixXd> samples;  // samples[k] is num_samples x dim
  std::vector<double> log_prob;          // joint log-density after each sweep
  std::vector<double> seconds;           // elapsed wall-clock after each sweep
  std::vector<std::size_t> accepted;     // cumulative accepted moves after each sweep
  std::vector<std::size_t> proposals;    // cumulative proposals after each sweep
  std::vector<std::size_t> fallbacks;    // cumulative fallback proposals after each sweep
  std::vector<NodeStats> stats;

  std::size_t num_samples() const { return log_prob.size(); }
  // Index of `name` in nodes; throws std::out_of_range.
  std::size_t index(const std::string& name) const;
  Eigen::VectorXd value(std::size_t k, std::size_t t) const { return samples.at(k).row(t); }
  // World for sweep t (latents from the trace, observed from the model).
  World world_at(const Model& model, std::size_t t) const;
};

using StepCallback = std::function<void(NodeId, const StepResult&)>;

Trace run(const Model& model, const SamplerConfig& config);
Trace run(const Model& model, const Observations& observations, const SamplerConfig& config);
// Continues from an existing world with the caller's rng.
Trace run_from(const Model& model, World world, const SamplerConfig& config, Rng& rng,
               const StepCallback& on_step = {});

}  // namespace nmc
