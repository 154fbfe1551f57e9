#include "nmc/harness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace nmc {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Keeps the data stream apart from the sampler stream of the same seed.
constexpr std::uint64_t kDataStream = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kPilotStream = 0xD1B54A32D192ED03ULL;

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

bool step_sensitive(Method method, const Node& node) {
  if (method == Method::Mala) return node.support.kind == SupportKind::RealVector;
  return node.support.kind != SupportKind::Categorical;
}

double mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(const std::vector<double>& xs) {
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::vector<double> predictive_ll(const std::vector<double>& per_sample) {
  std::vector<double> out;
  out.reserve(per_sample.size());
  double max = -std::numeric_limits<double>::infinity();
  double scaled = 0.0;  // sum of exp(v - max)
  for (std::size_t t = 0; t < per_sample.size(); ++t) {
    const double v = per_sample[t];
    if (v > max) {
      scaled = scaled * std::exp(max - v) + 1.0;
      max = v;
    } else {
      scaled += std::exp(v - max);
    }
    out.push_back(max + std::log(scaled) - std::log(static_cast<double>(t + 1)));
  }
  return out;
}

std::vector<double> predictive_ll(const ModelSpec& spec, const Dataset& train,
                                  const Dataset& heldout, const Trace& trace, EvalMode mode) {
  if (heldout.rows() == 0) throw std::invalid_argument("predictive_ll: empty heldout set");
  return predictive_ll(heldout_log_likelihood(spec, train, heldout, trace, mode));
}

std::size_t samples_to_convergence(const std::vector<double>& series) {
  if (series.empty()) throw std::invalid_argument("samples_to_convergence: empty series");
  const double last = series.back();
  if (!std::isfinite(last) || last == 0.0)
    throw std::invalid_argument("samples_to_convergence: final value must be finite and nonzero");
  const double band = 0.01 * std::abs(last);
  std::size_t t = series.size();
  while (t > 0 && std::abs(series[t - 1] - last) <= band) --t;
  return t + 1;
}

double tune_step(const Model& model, const SamplerConfig& config, double target,
                 std::size_t sweeps, std::uint64_t seed) {
  if (config.method == Method::Nmc) throw std::invalid_argument("tune_step: NMC has no step");
  if (!(target > 0 && target < 1)) throw std::invalid_argument("tune_step: target in (0, 1)");
  if (sweeps < 2) throw std::invalid_argument("tune_step: need at least two pilot sweeps");
  SamplerConfig c = config;
  double& step = c.method == Method::Mala ? c.mala_step : c.rwm_step;
  double log_step = std::log(step);
  Rng rng = make_rng(seed ^ kPilotStream);
  World world = init_world(model, rng);
  double tail_sum = 0.0;
  std::size_t tail_count = 0;
  for (std::size_t s = 0; s < sweeps; ++s) {
    step = std::exp(log_step);
    const ProposalFn propose = make_proposer(model, c);
    double acc = 0.0;
    std::size_t moves = 0;
    for (NodeId id : model.latent()) {
      const StepResult r = mh_step(model, world, id, propose, rng);
      if (!step_sensitive(c.method, model.node(id))) continue;
      acc += r.accept_prob;
      ++moves;
    }
    if (moves == 0) break;
    log_step += (acc / static_cast<double>(moves) - target) /
                std::pow(static_cast<double>(s + 1), 0.6);
    if (2 * s >= sweeps) {
      tail_sum += log_step;
      ++tail_count;
    }
  }
  return std::exp(tail_count ? tail_sum / static_cast<double>(tail_count) : log_step);
}

void ExperimentConfig::validate() const {
  model.validate();
  sampler.validate();
  if (model.kind != ModelKind::Funnel && !(holdout_fraction > 0 && holdout_fraction < 1))
    throw std::invalid_argument("holdout_fraction must lie in (0, 1)");
  if (tune_target && !(*tune_target > 0 && *tune_target < 1))
    throw std::invalid_argument("tune_target must lie in (0, 1)");
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.model = model_spec_from_json(j);
    SamplerConfig& s = c.sampler;
    s.method = parse_method(j.value("method", std::string("nmc")));
    s.num_samples = j.value("num_samples", s.num_samples);
    s.seed = j.value("seed", s.seed);
    s.eig_floor = j.value("eig_floor", s.eig_floor);
    s.rwm_step = j.value("rwm_step", s.rwm_step);
    s.mala_step = j.value("mala_step", s.mala_step);
    s.simplex_concentration = j.value("simplex_concentration", s.simplex_concentration);
    s.random_scan = j.value("random_scan", s.random_scan);
    c.holdout_fraction = j.value("holdout_fraction", c.holdout_fraction);
    if (j.contains("eval_mode")) c.eval_mode = parse_eval_mode(j.at("eval_mode").get<std::string>());
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("tune_target") && !j.at("tune_target").is_null())
      c.tune_target = j.at("tune_target").get<double>();
    c.tune_sweeps = j.value("tune_sweeps", c.tune_sweeps);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json ExperimentConfig::to_json() const {
  json j = nmc::to_json(model);
  j["method"] = to_string(sampler.method);
  j["num_samples"] = sampler.num_samples;
  j["seed"] = sampler.seed;
  j["eig_floor"] = sampler.eig_floor;
  j["rwm_step"] = sampler.rwm_step;
  j["mala_step"] = sampler.mala_step;
  j["simplex_concentration"] = sampler.simplex_concentration;
  j["random_scan"] = sampler.random_scan;
  j["holdout_fraction"] = holdout_fraction;
  j["eval_mode"] = to_string(eval_mode);
  j["output_dir"] = output_dir.string();
  j["tune_target"] = tune_target ? json(*tune_target) : json(nullptr);
  j["tune_sweeps"] = tune_sweeps;
  return j;
}

std::vector<MetricsRow> make_metrics(const Trace& trace, const std::vector<double>& pred_ll) {
  const std::size_t n = trace.num_samples();
  if (!pred_ll.empty() && pred_ll.size() != n)
    throw std::invalid_argument("make_metrics: series length differs from the trace");
  std::vector<MetricsRow> rows(n);
  for (std::size_t t = 0; t < n; ++t) {
    MetricsRow& r = rows[t];
    r.sample = t + 1;
    r.seconds = trace.seconds.at(t);
    r.pred_ll = pred_ll.empty() ? kNaN : pred_ll[t];
    r.acceptance = trace.proposals.at(t) ? static_cast<double>(trace.accepted.at(t)) /
                                               static_cast<double>(trace.proposals[t])
                                         : kNaN;
    r.fallbacks = trace.fallbacks.at(t);
  }
  return rows;
}

void write_metrics(const fs::path& path, const std::vector<MetricsRow>& rows) {
  std::vector<double> sample, seconds, pred, acc, fb;
  for (const MetricsRow& r : rows) {
    sample.push_back(static_cast<double>(r.sample));
    seconds.push_back(r.seconds);
    pred.push_back(r.pred_ll);
    acc.push_back(r.acceptance);
    fb.push_back(static_cast<double>(r.fallbacks));
  }
  Table t;
  t.add("sample", ColumnType::Int, sample);
  t.add("seconds", ColumnType::Real, seconds);
  t.add("pred_ll", ColumnType::Real, pred);
  t.add("acceptance", ColumnType::Real, acc);
  t.add("fallbacks", ColumnType::Int, fb);
  write_table(path, t);
}

std::vector<MetricsRow> read_metrics(const fs::path& path) {
  const Table t = read_table(path);
  std::vector<MetricsRow> rows(t.rows());
  const auto& sample = t.column("sample");
  const auto& seconds = t.column("seconds");
  const auto& pred = t.column("pred_ll");
  const auto& acc = t.column("acceptance");
  const auto& fb = t.column("fallbacks");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i] = {static_cast<std::size_t>(sample[i]), seconds[i], pred[i], acc[i],
               static_cast<std::size_t>(fb[i])};
    if (i > 0 && rows[i].sample <= rows[i - 1].sample)
      throw IoError(path.string() + ": sample index must increase");
  }
  return rows;
}

json report(const std::vector<MetricsRow>& rows) {
  json j;
  j["num_samples"] = rows.size();
  if (rows.empty()) return j;
  const MetricsRow& last = rows.back();
  j["total_seconds"] = last.seconds;
  j["acceptance_rate"] = number_or_null(last.acceptance);
  j["fallbacks"] = last.fallbacks;
  j["final_pred_ll"] = number_or_null(last.pred_ll);
  std::vector<double> series;
  for (const MetricsRow& r : rows) series.push_back(r.pred_ll);
  j["samples_to_convergence"] = nullptr;
  if (std::isfinite(last.pred_ll) && last.pred_ll != 0.0)
    j["samples_to_convergence"] = samples_to_convergence(series);
  return j;
}

double ks_normal(std::vector<double> xs, double loc, double scale) {
  if (xs.empty()) throw std::invalid_argument("ks_normal: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = 0.5 * std::erfc(-(xs[i] - loc) / (scale * std::sqrt(2.0)));
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

ExperimentResult run_on_dataset(const ExperimentConfig& config, const StoredDataset& data) {
  config.validate();
  ExperimentResult result;
  result.data = data.split;
  const ModelSpec& spec = data.spec;
  const Model model = build(spec, data.split.train);

  SamplerConfig sampler = config.sampler;
  if (config.tune_target && sampler.method != Method::Nmc) {
    const double step =
        tune_step(model, sampler, *config.tune_target, config.tune_sweeps, sampler.seed);
    (sampler.method == Method::Mala ? sampler.mala_step : sampler.rwm_step) = step;
  }
  result.trace = run(model, sampler);

  std::vector<double> series;
  if (spec.kind != ModelKind::Funnel)
    series = predictive_ll(spec, data.split.train, data.split.heldout, result.trace,
                           config.eval_mode);
  result.metrics = make_metrics(result.trace, series);

  json& s = result.summary;
  s = report(result.metrics);
  s["config"] = config.to_json();
  s["config"]["model"] = to_string(spec.kind);
  s["rwm_step"] = sampler.rwm_step;
  s["mala_step"] = sampler.mala_step;
  json nodes = json::object();
  for (std::size_t k = 0; k < result.trace.names.size(); ++k) {
    const NodeStats& st = result.trace.stats[k];
    nodes[result.trace.names[k]] = {
        {"acceptance_rate", st.proposals ? static_cast<double>(st.accepted) /
                                               static_cast<double>(st.proposals)
                                         : 0.0},
        {"fallbacks", st.fallbacks}};
  }
  s["nodes"] = nodes;

  if (spec.kind == ModelKind::Funnel) {
    const Eigen::MatrixXd& z = result.trace.samples.at(result.trace.index("z"));
    const std::vector<double> zs(z.data(), z.data() + z.size());
    s["z_mean"] = mean(zs);
    s["z_sd"] = zs.size() > 1 ? stddev(zs) : 0.0;
    s["z_ks"] = ks_normal(zs, 0.0, 3.0);
  }
  if (spec.kind == ModelKind::Annotation) {
    const Eigen::VectorXd& truth = data.split.truth.at("z");
    s["accuracy"] = accuracy(posterior_mode_z(result.trace, spec.n), truth);
    s["majority_vote_accuracy"] =
        accuracy(majority_vote(data.split.train.labels, spec.n, spec.c), truth);
  }
  return result;
}

StoredDataset generate_dataset(const ModelSpec& spec, std::uint64_t seed, double holdout_fraction) {
  StoredDataset data;
  data.spec = spec;
  data.seed = seed;
  data.holdout_fraction = holdout_fraction;
  Rng rng = make_rng(seed ^ kDataStream);
  data.split = generate_and_split(spec, rng, holdout_fraction);
  return data;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const StoredDataset data =
      generate_dataset(config.model, config.sampler.seed, config.holdout_fraction);
  ExperimentResult result = run_on_dataset(config, data);
  if (!config.output_dir.empty()) write_results(config.output_dir, result);
  return result;
}

void write_results(const fs::path& dir, const ExperimentResult& result) {
  write_trace(dir, result.trace);
  write_metrics(dir / "metrics.csv", result.metrics);
  write_json(dir / "summary.json", result.summary);
}

}  // namespace nmc
