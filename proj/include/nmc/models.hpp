#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "nmc/engine.hpp"
#include "nmc/graph.hpp"

namespace nmc {

enum class ModelKind { Funnel, Blr, Robust, Annotation };

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);

// Normal scales are standard deviations. Exponential(sigma_mean) has mean
// sigma_mean. The robust-regression values are declared defaults.
struct Hyperparams {
  double sigma_mean = 1.0;
  double alpha_scale = 10.0;
  double beta_loc = 0.0;
  double beta_scale = 2.5;
  double j_loc = 2.5;
  double gamma = 10.0;
  double rho = 0.5;
};

struct ModelSpec {
  ModelKind kind = ModelKind::Funnel;
  std::size_t n = 0;  // rows / items
  std::size_t k = 0;  // covariates / labelers
  std::size_t c = 0;  // classes (annotation)
  Hyperparams hyper;

  void validate() const;
};

struct LabelRow {
  std::size_t item = 0;
  std::size_t labeler = 0;
  std::size_t label = 0;
};

// Observed data of one model instance. Regression models fill x and y; the
// annotation model fills labels and j_sizes.
struct Dataset {
  Eigen::MatrixXd x;                  // rows x K
  Eigen::VectorXd y;
  std::vector<LabelRow> labels;
  std::vector<std::size_t> j_sizes;   // labelers drawn per item, before any split

  std::size_t rows() const;
};

// Generating values of the latents, keyed by node name ("z" holds every z_i).
using Truth = std::map<std::string, Eigen::VectorXd>;

struct GeneratedData {
  Dataset data;
  Truth truth;
};

struct Split {
  Dataset train;
  Dataset heldout;
  Truth truth;
};

// Annotation prior concentration: gamma * rho on the diagonal and
// gamma * (1 - rho) / (C - 1) elsewhere; row m is alpha_m.
Eigen::MatrixXd annotation_alpha(std::size_t c, double gamma, double rho);

GeneratedData generate(const ModelSpec& spec, Rng& rng);
// Random partition of the rows (label rows for annotation).
std::pair<Dataset, Dataset> split_rows(const Dataset& data, double holdout_fraction, Rng& rng);
Split generate_and_split(const ModelSpec& spec, Rng& rng, double holdout_fraction);

Model build_funnel();
Model build_blr(const Dataset& train);
Model build_robust(const Dataset& train, const Hyperparams& hyper);
Model build_annotation(const Dataset& train, std::size_t n, std::size_t k, std::size_t c,
                       const Hyperparams& hyper);
// Dispatches on spec.kind.
Model build(const ModelSpec& spec, const Dataset& train);

inline std::string theta_name(std::size_t labeler, std::size_t cls) {
  return "theta_" + std::to_string(labeler) + "_" + std::to_string(cls);
}
inline std::string z_name(std::size_t item) { return "z_" + std::to_string(item); }

enum class EvalMode { ConditionalOnZ, ZIntegrated };

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(const std::string& name);

// log p(heldout | parameters of sweep t), one value per sweep of the trace.
// Annotation in z-integrated mode averages each item's heldout labels over
// p(z_i | pi, theta, the item's training labels).
std::vector<double> heldout_log_likelihood(const ModelSpec& spec, const Dataset& train,
                                           const Dataset& heldout, const Trace& trace,
                                           EvalMode mode = EvalMode::ZIntegrated);

// Annotation diagnostics.
// Most frequent sampled z_i after dropping the first `burn_fraction` of sweeps.
std::vector<std::size_t> posterior_mode_z(const Trace& trace, std::size_t n,
                                          double burn_fraction = 0.1);
// Per-item majority of the given labels; ties go to the more frequent label
// overall and unlabeled items get the overall most frequent label.
std::vector<std::size_t> majority_vote(const std::vector<LabelRow>& labels, std::size_t n,
                                       std::size_t c);
double accuracy(const std::vector<std::size_t>& predicted, const Eigen::VectorXd& truth);

}  // namespace nmc
