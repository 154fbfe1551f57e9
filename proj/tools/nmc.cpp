// Command-line front end: generate datasets, sample, evaluate and report.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "nmc/harness.hpp"
#include "nmc/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct SamplerFlags {
  std::string config_path;
  std::optional<std::string> method;
  std::optional<std::size_t> num_samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> rwm_step, mala_step, eig_floor, tune_target;
  std::optional<std::string> eval_mode;

  void add_to(CLI::App* app) {
    app->add_option("-c,--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    app->add_option("-m,--method", method, "nmc, rwm or mala");
    app->add_option("-n,--num-samples", num_samples, "Sweeps to record");
    app->add_option("-s,--seed", seed, "Sampler seed");
    app->add_option("--rwm-step", rwm_step, "Random-walk step (sd)");
    app->add_option("--mala-step", mala_step, "MALA epsilon");
    app->add_option("--eig-floor", eig_floor, "Relative eigenvalue floor");
    app->add_option("--tune-target", tune_target, "Tune the RWM/MALA step to this acceptance");
    app->add_option("--eval-mode", eval_mode, "conditional or z-integrated");
  }

  // Config file values, then command-line overrides.
  json merged() const {
    json j = config_path.empty() ? json::object() : nmc::read_json(config_path);
    if (method) j["method"] = *method;
    if (num_samples) j["num_samples"] = *num_samples;
    if (seed) j["seed"] = *seed;
    if (rwm_step) j["rwm_step"] = *rwm_step;
    if (mala_step) j["mala_step"] = *mala_step;
    if (eig_floor) j["eig_floor"] = *eig_floor;
    if (tune_target) j["tune_target"] = *tune_target;
    if (eval_mode) j["eval_mode"] = *eval_mode;
    return j;
  }
};

void print_json(const json& j) { std::cout << j.dump(2) << '\n'; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Newtonian Monte Carlo sampler and experiment harness"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a dataset and split it");
  std::string gen_model = "blr";
  std::size_t gen_n = 0, gen_k = 0, gen_c = 0;
  std::uint64_t gen_seed = 0;
  double gen_holdout = 0.5;
  std::string gen_hyper, gen_out;
  gen->add_option("model", gen_model, "funnel, blr, robust or annotation")->required();
  gen->add_option("-N,--rows", gen_n, "Rows or items");
  gen->add_option("-K,--covariates", gen_k, "Covariates or labelers");
  gen->add_option("-C,--classes", gen_c, "Classes (annotation)");
  gen->add_option("-s,--seed", gen_seed, "Data seed");
  gen->add_option("--holdout", gen_holdout, "Heldout fraction")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--hyperparams", gen_hyper, "JSON object of hyperparameters");
  gen->add_option("-o,--out", gen_out, "Dataset directory")->required();

  // sample
  auto* smp = app.add_subcommand("sample", "Sample a stored dataset");
  std::string smp_data, smp_out;
  SamplerFlags smp_flags;
  smp->add_option("-d,--data", smp_data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  smp->add_option("-o,--out", smp_out, "Results directory")->required();
  smp_flags.add_to(smp);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Recompute metrics from a trace and heldout data");
  std::string ev_data, ev_trace, ev_out, ev_mode = "z-integrated";
  ev->add_option("-d,--data", ev_data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  ev->add_option("-t,--trace", ev_trace, "Results directory holding trace.csv")
      ->required()
      ->check(CLI::ExistingDirectory);
  ev->add_option("--eval-mode", ev_mode, "conditional or z-integrated");
  ev->add_option("-o,--out", ev_out, "Metrics CSV (default <trace>/metrics.csv)");

  // report
  auto* rep = app.add_subcommand("report", "Summarize a metrics CSV");
  std::string rep_metrics, rep_out;
  rep->add_option("metrics", rep_metrics, "Metrics CSV")->required()->check(CLI::ExistingFile);
  rep->add_option("-o,--out", rep_out, "Summary JSON (default stdout)");

  // run
  auto* runc = app.add_subcommand("run", "Generate, sample and evaluate from one config");
  std::string run_out;
  SamplerFlags run_flags;
  run_flags.add_to(runc);
  runc->add_option("-o,--out", run_out, "Results directory (overrides output_dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      json j = {{"model", gen_model}, {"sizes", {{"N", gen_n}, {"K", gen_k}, {"C", gen_c}}}};
      if (!gen_hyper.empty()) j["hyperparams"] = json::parse(gen_hyper);
      const nmc::ModelSpec spec = nmc::model_spec_from_json(j);
      const nmc::StoredDataset data = nmc::generate_dataset(spec, gen_seed, gen_holdout);
      nmc::write_dataset(gen_out, data);
      std::cout << "wrote " << gen_out << '\n';
    } else if (*smp) {
      const nmc::StoredDataset data = nmc::read_dataset(smp_data);
      json j = smp_flags.merged();
      const json spec = nmc::to_json(data.spec);
      for (const auto& [key, value] : spec.items()) j[key] = value;
      j["holdout_fraction"] = data.holdout_fraction;
      nmc::ExperimentConfig config = nmc::ExperimentConfig::from_json(j);
      config.output_dir = smp_out;
      const nmc::ExperimentResult result = nmc::run_on_dataset(config, data);
      nmc::write_results(smp_out, result);
      print_json(result.summary);
    } else if (*ev) {
      const nmc::StoredDataset data = nmc::read_dataset(ev_data);
      const nmc::Trace trace = nmc::read_trace(ev_trace);
      std::vector<double> series;
      if (data.spec.kind != nmc::ModelKind::Funnel) {
        series = nmc::predictive_ll(data.spec, data.split.train, data.split.heldout, trace,
                                    nmc::parse_eval_mode(ev_mode));
      }
      const fs::path out = ev_out.empty() ? fs::path(ev_trace) / "metrics.csv" : fs::path(ev_out);
      nmc::write_metrics(out, nmc::make_metrics(trace, series));
      std::cout << "wrote " << out.string() << '\n';
    } else if (*rep) {
      const json summary = nmc::report(nmc::read_metrics(rep_metrics));
      if (rep_out.empty()) {
        print_json(summary);
      } else {
        nmc::write_json(rep_out, summary);
      }
    } else if (*runc) {
      nmc::ExperimentConfig config = nmc::ExperimentConfig::from_json(run_flags.merged());
      if (!run_out.empty()) config.output_dir = run_out;
      const nmc::ExperimentResult result = nmc::run_experiment(config);
      print_json(result.summary);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
