#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nmc/engine.hpp"
#include "nmc/io.hpp"
#include "nmc/models.hpp"

namespace nmc {

// Running posterior-averaged predictive density in log space:
// out[t] = log((1/(t+1)) * sum_{s<=t} exp(per_sample[s])).
std::vector<double> predictive_ll(const std::vector<double>& per_sample);
std::vector<double> predictive_ll(const ModelSpec& spec, const Dataset& train,
                                  const Dataset& heldout, const Trace& trace,
                                  EvalMode mode = EvalMode::ZIntegrated);

// Smallest 1-based t with |series[s] - series.back()| <= 0.01 |series.back()|
// for every s >= t. Throws std::invalid_argument on an empty series or a
// zero or non-finite final value.
std::size_t samples_to_convergence(const std::vector<double>& series);

// Pilot Robbins-Monro adaptation of the RWM or MALA step toward a target mean
// acceptance probability. The pilot chain is discarded; the returned step is
// then used unchanged.
double tune_step(const Model& model, const SamplerConfig& config, double target,
                 std::size_t sweeps, std::uint64_t seed);

struct ExperimentConfig {
  ModelSpec model;
  SamplerConfig sampler;
  double holdout_fraction = 0.5;
  EvalMode eval_mode = EvalMode::ZIntegrated;
  std::filesystem::path output_dir;  // empty: nothing is written
  // When set, RWM/MALA steps come from a pilot run aimed at this acceptance.
  std::optional<double> tune_target;
  std::size_t tune_sweeps = 300;

  void validate() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

struct MetricsRow {
  std::size_t sample = 0;  // 1-based
  double seconds = 0.0;
  double pred_ll = 0.0;    // NaN when the model has no heldout data
  double acceptance = 0.0; // cumulative
  std::size_t fallbacks = 0;
};

std::vector<MetricsRow> make_metrics(const Trace& trace, const std::vector<double>& pred_ll);
void write_metrics(const std::filesystem::path& path, const std::vector<MetricsRow>& rows);
std::vector<MetricsRow> read_metrics(const std::filesystem::path& path);

// total seconds, samples to convergence (null when undefined), final
// predictive LL, acceptance rate and fallback count.
nlohmann::json report(const std::vector<MetricsRow>& rows);

struct ExperimentResult {
  Split data;
  Trace trace;
  std::vector<MetricsRow> metrics;
  nlohmann::json summary;
};

// Samples the stored dataset with the configured method and evaluates it.
ExperimentResult run_on_dataset(const ExperimentConfig& config, const StoredDataset& data);
// Data stream for `seed`; distinct from the sampler stream of the same seed.
StoredDataset generate_dataset(const ModelSpec& spec, std::uint64_t seed, double holdout_fraction);
// generate_dataset from config.sampler.seed, then run_on_dataset.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Writes samples/, trace.csv, metrics.csv and summary.json under dir.
void write_results(const std::filesystem::path& dir, const ExperimentResult& result);

// Kolmogorov-Smirnov distance between a sample and N(loc, scale).
double ks_normal(std::vector<double> xs, double loc, double scale);

}  // namespace nmc
