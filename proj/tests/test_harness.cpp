#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>

#include "doctest.h"
#include "nmc/harness.hpp"
#include "nmc/io.hpp"

using namespace nmc;
namespace fs = std::filesystem;

namespace {

// Fresh scratch directory under the system temp dir.
fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nmc_test_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

double log_mean_exp(const std::vector<double>& v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s / double(v.size()));
}

ExperimentConfig small_config(ModelKind kind, Method method, std::size_t n) {
  ExperimentConfig c;
  c.model = {kind, 40, 2, 3, {}};
  if (kind == ModelKind::Annotation) c.model.k = 4;
  c.sampler.method = method;
  c.sampler.num_samples = n;
  c.sampler.seed = 3;
  return c;
}

bool same_except_time(const Trace& a, const Trace& b) {
  if (a.names != b.names || a.log_prob != b.log_prob || a.accepted != b.accepted ||
      a.proposals != b.proposals || a.fallbacks != b.fallbacks) {
    return false;
  }
  for (std::size_t k = 0; k < a.samples.size(); ++k) {
    if (a.samples[k] != b.samples[k]) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("samples to convergence") {
  CHECK(samples_to_convergence({-5.0, -5.0, -5.0, -5.0}) == 1);
  CHECK(samples_to_convergence({-100.0, -52.0, -50.4, -50.1, -50.0}) == 3);
  CHECK(samples_to_convergence({-100.0, -80.0, -60.0, -40.0}) == 4);
  CHECK(samples_to_convergence({7.0}) == 1);
  // A late excursion resets the count.
  CHECK(samples_to_convergence({-10.0, -10.0, -20.0, -10.0}) == 4);
  CHECK_THROWS_AS(samples_to_convergence({}), std::invalid_argument);
  CHECK_THROWS_AS(samples_to_convergence({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(samples_to_convergence({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("running predictive log-likelihood") {
  const std::vector<double> per = {-10.0, -12.0, -9.5, -30.0};
  const std::vector<double> run = predictive_ll(per);
  REQUIRE(run.size() == per.size());
  for (std::size_t t = 0; t < per.size(); ++t) {
    const std::vector<double> prefix(per.begin(), per.begin() + long(t) + 1);
    CHECK(run[t] == doctest::Approx(log_mean_exp(prefix)).epsilon(1e-12));
  }
  CHECK(run[0] == per[0]);
  // Identical samples average to themselves.
  const std::vector<double> same = predictive_ll({-4.2, -4.2, -4.2});
  for (double v : same) CHECK(v == doctest::Approx(-4.2).epsilon(1e-14));
  CHECK(samples_to_convergence(same) == 1);
  // Far below double range still works in log space.
  const std::vector<double> tiny = predictive_ll({-2000.0, -2000.0 + std::log(3.0)});
  CHECK(tiny[1] == doctest::Approx(-2000.0 + std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("predictive log-likelihood is invariant to the order of the final set") {
  const std::vector<double> a = {-3.0, -1.0, -7.0, -2.5};
  const std::vector<double> b = {-2.5, -7.0, -3.0, -1.0};
  CHECK(predictive_ll(a).back() == doctest::Approx(predictive_ll(b).back()).epsilon(1e-12));
}

TEST_CASE("model-level predictive likelihood agrees with the per-sweep evaluation") {
  const ExperimentConfig c = small_config(ModelKind::Robust, Method::Nmc, 30);
  const StoredDataset d = generate_dataset(c.model, 4, 0.5);
  const Model m = build(c.model, d.split.train);
  const Trace t = run(m, c.sampler);
  const std::vector<double> per = heldout_log_likelihood(c.model, d.split.train, d.split.heldout, t);
  const std::vector<double> series = predictive_ll(c.model, d.split.train, d.split.heldout, t);
  CHECK(series[0] == doctest::Approx(per[0]).epsilon(1e-12));
  CHECK(series.back() == doctest::Approx(log_mean_exp(per)).epsilon(1e-10));
  CHECK_THROWS(predictive_ll(c.model, d.split.train, Dataset{}, t));
}

TEST_CASE("a chain of repeated identical sweeps converges at the first sample") {
  const ExperimentConfig c = small_config(ModelKind::Blr, Method::Nmc, 1);
  const StoredDataset d = generate_dataset(c.model, 9, 0.5);
  const Model m = build(c.model, d.split.train);
  Trace t = run(m, c.sampler);
  // Repeat sweep 0 ten times.
  for (Eigen::MatrixXd& s : t.samples) s = s.row(0).replicate(10, 1).eval();
  t.log_prob.assign(10, t.log_prob[0]);
  const std::vector<double> series = predictive_ll(c.model, d.split.train, d.split.heldout, t);
  for (double v : series) CHECK(v == doctest::Approx(series[0]).epsilon(1e-12));
  CHECK(samples_to_convergence(series) == 1);
}

TEST_CASE("step tuning moves the acceptance rate toward the target") {
  const ExperimentConfig c = small_config(ModelKind::Robust, Method::Rwm, 1);
  const StoredDataset d = generate_dataset(c.model, 2, 0.5);
  const Model m = build(c.model, d.split.train);
  SamplerConfig s = c.sampler;
  s.rwm_step = 5.0;
  const double step = tune_step(m, s, 0.3, 400, 7);
  CHECK(step > 0.0);
  CHECK(step < 5.0);
  CHECK(tune_step(m, s, 0.3, 400, 7) == step);
  s.rwm_step = step;
  s.num_samples = 1000;
  const Trace t = run(m, s);
  const double rate = double(t.accepted.back()) / double(t.proposals.back());
  CHECK(rate > 0.1);
  CHECK(rate < 0.6);
}

TEST_CASE("experiment config parsing") {
  const nlohmann::json j = nlohmann::json::parse(R"({
    "model": "robust", "sizes": {"N": 50, "K": 3},
    "hyperparams": {"sigma_mean": 2.0},
    "method": "MALA", "num_samples": 40, "seed": 12, "mala_step": 0.05,
    "holdout_fraction": 0.25, "eval_mode": "conditional", "tune_target": 0.5
  })");
  const ExperimentConfig c = ExperimentConfig::from_json(j);
  CHECK(c.model.kind == ModelKind::Robust);
  CHECK(c.model.n == 50);
  CHECK(c.model.k == 3);
  CHECK(c.model.hyper.sigma_mean == 2.0);
  CHECK(c.model.hyper.beta_scale == 2.5);
  CHECK(c.sampler.method == Method::Mala);
  CHECK(c.sampler.num_samples == 40);
  CHECK(c.sampler.seed == 12);
  CHECK(c.sampler.mala_step == 0.05);
  CHECK(c.holdout_fraction == 0.25);
  CHECK(c.eval_mode == EvalMode::ConditionalOnZ);
  REQUIRE(c.tune_target.has_value());
  CHECK(*c.tune_target == 0.5);

  const ExperimentConfig back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());

  CHECK_THROWS(ExperimentConfig::from_json(nlohmann::json::parse(R"({"model": "nope"})")));
  CHECK_THROWS(ExperimentConfig::from_json(
      nlohmann::json::parse(R"({"model": "blr", "sizes": {"N": 10, "K": 2}, "num_samples": 0})")));
  CHECK_THROWS(ExperimentConfig::from_json(nlohmann::json::parse(
      R"({"model": "blr", "sizes": {"N": 10, "K": 2}, "holdout_fraction": 1.0})")));
  CHECK_THROWS(ExperimentConfig::from_json(
      nlohmann::json::parse(R"({"model": "blr", "sizes": {"N": "ten", "K": 2}})")));
}

TEST_CASE("table round trip keeps values and types") {
  const fs::path dir = scratch("table");
  Table t;
  t.add("a", ColumnType::Int, {1, 2, 3});
  t.add("b", ColumnType::Real, {0.1, -2.5e-17, std::numeric_limits<double>::quiet_NaN()});
  t.add("c", ColumnType::Real, {std::numeric_limits<double>::infinity(), 1.0 / 3.0, -7.0});
  write_table(dir / "t.csv", t);
  const Table r = read_table(dir / "t.csv");
  CHECK(r.names == t.names);
  CHECK(r.types == t.types);
  CHECK(r.column("a") == t.column("a"));
  CHECK(r.column("b")[0] == t.column("b")[0]);
  CHECK(r.column("b")[1] == t.column("b")[1]);
  CHECK(std::isnan(r.column("b")[2]));
  CHECK(r.column("c") == t.column("c"));
  CHECK_THROWS_AS(r.column("missing"), IoError);

  std::ofstream(dir / "bad.csv") << "a:real,b:int\n1.0\n";
  CHECK_THROWS_AS(read_table(dir / "bad.csv"), IoError);
  std::ofstream(dir / "badtype.csv") << "a:complex\n1.0\n";
  CHECK_THROWS_AS(read_table(dir / "badtype.csv"), IoError);
  CHECK_THROWS_AS(read_table(dir / "absent.csv"), IoError);
  fs::remove_all(dir);
}

TEST_CASE("dataset round trip") {
  for (ModelKind kind : {ModelKind::Funnel, ModelKind::Blr, ModelKind::Robust, ModelKind::Annotation}) {
    const fs::path dir = scratch("dataset_" + to_string(kind));
    ModelSpec spec{kind, 30, 3, 3, {}};
    spec.hyper.gamma = 12.0;
    const StoredDataset d = generate_dataset(spec, 21, 0.3);
    write_dataset(dir, d);
    const StoredDataset r = read_dataset(dir);
    CHECK(r.spec.kind == kind);
    CHECK(r.seed == 21);
    CHECK(r.holdout_fraction == 0.3);
    CHECK(r.spec.hyper.gamma == 12.0);
    CHECK(r.split.train.x == d.split.train.x);
    CHECK(r.split.train.y == d.split.train.y);
    CHECK(r.split.heldout.x == d.split.heldout.x);
    CHECK(r.split.heldout.y == d.split.heldout.y);
    CHECK(r.split.train.labels.size() == d.split.train.labels.size());
    CHECK(r.split.train.j_sizes == d.split.train.j_sizes);
    REQUIRE(r.split.truth.size() == d.split.truth.size());
    for (const auto& [name, v] : d.split.truth) CHECK(r.split.truth.at(name) == v);
    fs::remove_all(dir);
  }
}

TEST_CASE("trace and metrics round trip") {
  const fs::path dir = scratch("trace");
  const ExperimentConfig c = small_config(ModelKind::Annotation, Method::Nmc, 15);
  const StoredDataset d = generate_dataset(c.model, 1, 0.5);
  const ExperimentResult res = run_on_dataset(c, d);
  write_results(dir, res);
  const Trace t = read_trace(dir);
  CHECK(same_except_time(t, res.trace));
  CHECK(t.seconds.size() == res.trace.seconds.size());
  const std::vector<MetricsRow> rows = read_metrics(dir / "metrics.csv");
  REQUIRE(rows.size() == 15);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].sample == i + 1);
    CHECK(rows[i].pred_ll == res.metrics[i].pred_ll);
    CHECK(rows[i].acceptance == res.metrics[i].acceptance);
    CHECK(rows[i].fallbacks == res.metrics[i].fallbacks);
  }
  const nlohmann::json summary = read_json(dir / "summary.json");
  CHECK(summary.at("num_samples") == 15);
  CHECK(summary.contains("accuracy"));
  fs::remove_all(dir);
}

TEST_CASE("metrics have one row per sample and a consistent report") {
  for (Method method : {Method::Nmc, Method::Rwm, Method::Mala}) {
    const ExperimentConfig c = small_config(ModelKind::Blr, method, 25);
    const ExperimentResult r = run_experiment(c);
    REQUIRE(r.metrics.size() == 25);
    for (std::size_t i = 1; i < r.metrics.size(); ++i) {
      CHECK(r.metrics[i].seconds >= r.metrics[i - 1].seconds);
      CHECK(r.metrics[i].fallbacks >= r.metrics[i - 1].fallbacks);
    }
    const nlohmann::json rep = report(r.metrics);
    CHECK(rep.at("num_samples") == 25);
    CHECK(rep.at("final_pred_ll").get<double>() == r.metrics.back().pred_ll);
    CHECK(rep.at("acceptance_rate").get<double>() == r.metrics.back().acceptance);
    std::vector<double> series;
    for (const MetricsRow& row : r.metrics) series.push_back(row.pred_ll);
    CHECK(rep.at("samples_to_convergence").get<std::size_t>() == samples_to_convergence(series));
  }
}

TEST_CASE("funnel report has no convergence count but records z statistics") {
  ExperimentConfig c = small_config(ModelKind::Funnel, Method::Nmc, 50);
  const ExperimentResult r = run_experiment(c);
  CHECK(r.summary.at("samples_to_convergence").is_null());
  CHECK(r.summary.contains("z_mean"));
  CHECK(r.summary.contains("z_sd"));
  CHECK(r.summary.contains("z_ks"));
}

TEST_CASE("experiments are reproducible apart from timing") {
  for (ModelKind kind : {ModelKind::Robust, ModelKind::Annotation}) {
    ExperimentConfig c = small_config(kind, Method::Nmc, 20);
    const ExperimentResult a = run_experiment(c);
    const ExperimentResult b = run_experiment(c);
    CHECK(same_except_time(a.trace, b.trace));
    for (std::size_t i = 0; i < a.metrics.size(); ++i) {
      CHECK(a.metrics[i].pred_ll == b.metrics[i].pred_ll);
      CHECK(a.metrics[i].acceptance == b.metrics[i].acceptance);
    }
  }
}

TEST_CASE("KS distance against a normal") {
  CHECK(ks_normal({0.0}, 0.0, 1.0) == doctest::Approx(0.5));
  std::vector<double> grid;
  for (int i = 1; i < 1000; ++i) grid.push_back(double(i) / 1000.0);
  // Uniform(0,1) vs N(0.5, tiny) is about 0.5 away.
  CHECK(ks_normal(grid, 0.5, 1e-6) == doctest::Approx(0.5).epsilon(0.01));
}
