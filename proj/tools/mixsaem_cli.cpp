// mixsaem command-line driver: simulate, inject, fit, predict, benchmark.
#include <CLI11.hpp>
#include <algorithm>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mixsaem/baselines.hpp"
#include "mixsaem/benchmark.hpp"
#include "mixsaem/data_model.hpp"
#include "mixsaem/missingness.hpp"
#include "mixsaem/params_io.hpp"
#include "mixsaem/prediction.hpp"
#include "mixsaem/saem.hpp"
#include "mixsaem/simulation.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mixsaem;

namespace {

// Every command reads the same config layout; keys a command does not use
// are ignored, unknown keys are rejected.
struct CliConfig {
  std::uint64_t seed = 20251018;
  std::size_t n = 1000;
  std::string mechanism = "mcar";
  double rate = 0.3;
  std::vector<std::string> targets;
  std::vector<std::string> drivers;
  std::string method = "saem";
  int runs = 20;
  double test_fraction = 0.2;
  std::vector<std::string> methods{"saem", "mm", "cc", "full"};
  unsigned threads = 1;
  double baseline_ridge = 0.0;
  double threshold = 0.5;
  SaemConfig saem;
};

const std::vector<std::string> kMethods{"saem", "mm", "cc", "full", "external"};

void load_config(CliConfig& cfg, const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::exception& e) {
    throw DataError(path + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw DataError(path + ": expected a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const auto& k = it.key();
      const auto& v = it.value();
      if (k == "seed") cfg.seed = v.get<std::uint64_t>();
      else if (k == "n") cfg.n = v.get<std::size_t>();
      else if (k == "mechanism") cfg.mechanism = v.get<std::string>();
      else if (k == "rate") cfg.rate = v.get<double>();
      else if (k == "targets") cfg.targets = v.get<std::vector<std::string>>();
      else if (k == "drivers") cfg.drivers = v.get<std::vector<std::string>>();
      else if (k == "method") cfg.method = v.get<std::string>();
      else if (k == "runs") cfg.runs = v.get<int>();
      else if (k == "test_fraction") cfg.test_fraction = v.get<double>();
      else if (k == "methods") cfg.methods = v.get<std::vector<std::string>>();
      else if (k == "threads") cfg.threads = v.get<unsigned>();
      else if (k == "baseline_ridge") cfg.baseline_ridge = v.get<double>();
      else if (k == "threshold") cfg.threshold = v.get<double>();
      else if (k == "saem") apply_saem_config(cfg.saem, v.dump());
      else throw DataError(path + ": unknown key '" + k + "'");
    }
  } catch (const json::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string snapshot(const CliConfig& cfg, const std::string& command) {
  json j;
  j["command"] = command;
  j["seed"] = cfg.seed;
  j["n"] = cfg.n;
  j["mechanism"] = cfg.mechanism;
  j["rate"] = cfg.rate;
  j["targets"] = cfg.targets;
  j["drivers"] = cfg.drivers;
  j["method"] = cfg.method;
  j["runs"] = cfg.runs;
  j["test_fraction"] = cfg.test_fraction;
  j["methods"] = cfg.methods;
  j["threads"] = cfg.threads;
  j["baseline_ridge"] = cfg.baseline_ridge;
  j["threshold"] = cfg.threshold;
  j["saem"] = json::parse(saem_config_to_json(cfg.saem));
  return j.dump(2) + "\n";
}

std::size_t column_index(const Schema& schema, const std::string& name) {
  for (std::size_t j = 0; j < schema.size(); ++j)
    if (schema.columns[j].name == name) return j;
  throw DataError("no covariate named '" + name + "'");
}

MissingnessSpec missingness_from(const CliConfig& cfg, const Schema& schema) {
  MissingnessSpec spec;
  spec.mechanism = parse_mechanism(cfg.mechanism);
  spec.rate = cfg.rate;
  spec.seed = cfg.seed;
  for (const auto& t : cfg.targets) spec.target_columns.push_back(column_index(schema, t));
  for (const auto& d : cfg.drivers) spec.driver_columns.push_back(column_index(schema, d));
  if (spec.mechanism == Mechanism::MAR && spec.driver_columns.empty()) {
    if (schema.size() != 7)
      throw DataError("MAR needs 'drivers' in the config unless the data has the 7-column layout");
    const auto ref = reference_mar(cfg.rate, cfg.seed);
    if (spec.target_columns.empty()) spec.target_columns = ref.target_columns;
    spec.driver_columns = ref.driver_columns;
  }
  if (spec.target_columns.empty())
    for (std::size_t j = 0; j < schema.size(); ++j) {
      bool driver = false;
      for (const auto d : spec.driver_columns) driver = driver || d == j;
      if (!driver) spec.target_columns.push_back(j);
    }
  return spec;
}

void prepare_dir(const std::string& dir) {
  if (dir.empty()) throw DataError("--out-dir is required");
  fs::create_directories(dir);
}

std::string in_dir(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

Schema schema_for(const std::string& schema_path, const std::string& data_path) {
  if (!schema_path.empty()) return load_schema(schema_path);
  const auto sibling = fs::path(data_path).parent_path() / "schema.json";
  if (fs::exists(sibling)) return load_schema(sibling.string());
  throw DataError("--schema is required (no schema.json next to the data file)");
}

void cmd_simulate(const CliConfig& cfg, const std::string& out) {
  prepare_dir(out);
  auto design = SyntheticDesign::reference();
  design.n = cfg.n;
  const auto ds = simulate(design, cfg.seed);
  save_csv(ds, in_dir(out, "data.csv"));
  write_text_file(in_dir(out, "schema.json"), schema_to_json(ds.schema()) + "\n");
  save_params(design.truth(), in_dir(out, "truth.json"));
  write_text_file(in_dir(out, "config.json"), snapshot(cfg, "simulate"));
}

void cmd_inject(const CliConfig& cfg, const std::string& data, const std::string& schema_path,
                const std::string& out) {
  const auto schema = schema_for(schema_path, data);
  const auto ds = load_csv(data, schema);
  const auto masked = inject(ds, missingness_from(cfg, ds.schema()));
  prepare_dir(out);
  save_csv(masked, in_dir(out, "data.csv"));
  write_text_file(in_dir(out, "schema.json"), schema_to_json(ds.schema()) + "\n");
  write_text_file(in_dir(out, "config.json"), snapshot(cfg, "inject"));
  std::cerr << "masked " << masked.missing_count() << " of " << masked.values().size()
            << " cells\n";
}

void cmd_fit(const CliConfig& cfg, const std::string& data, const std::string& schema_path,
             const std::string& out) {
  const auto schema = schema_for(schema_path, data);
  const auto encoding = cfg.saem.encoding;
  LogisticFitOptions opts;
  opts.ridge = cfg.baseline_ridge;
  prepare_dir(out);
  if (cfg.method == "saem") {
    const auto ds = load_csv(data, schema);
    SaemConfig sc = cfg.saem;
    sc.seed = derive_seed(cfg.seed, {stage_tag("saem")});
    const auto fit = fit_saem(ds, sc);
    save_params(fit.params, in_dir(out, "params.json"));
    write_text_file(in_dir(out, "trajectory.csv"), trajectory_csv(fit));
    std::cerr << "acceptance rate " << fit.mh_total.acceptance_rate() << "\n";
  } else {
    HybridDataset ds;
    HybridDataset train;
    if (cfg.method == "external") {
      ds = external_imputation_ingest(data, schema);
      train = ds;
    } else {
      ds = load_csv(data, schema);
      if (cfg.method == "mm") train = impute_mean_mode(ds);
      else if (cfg.method == "cc") train = complete_cases(ds);
      else if (cfg.method == "full") {
        if (!ds.fully_observed()) throw DataError("method full needs fully observed data");
        train = ds;
      } else {
        throw DataError("unknown method '" + cfg.method + "'");
      }
    }
    const auto beta = fit_logistic(covariate_matrix(train, encoding), outcome_vector(train), opts);
    save_params(baseline_params(ds, beta, encoding), in_dir(out, "params.json"));
  }
  write_text_file(in_dir(out, "config.json"), snapshot(cfg, "fit"));
}

void cmd_predict(const CliConfig& cfg, const std::string& data, const std::string& schema_path,
                 const std::string& params_path, const std::string& out) {
  if (params_path.empty()) throw DataError("--params is required");
  const auto schema = schema_for(schema_path, data);
  const auto ds = load_csv(data, schema);
  const auto params = load_params(params_path);
  const auto pred = predict_dataset(ds, params, cfg.saem.prediction_samples,
                                    derive_seed(cfg.seed, {stage_tag("predict")}), cfg.threshold,
                                    cfg.threads);
  prepare_dir(out);
  write_text_file(in_dir(out, "predictions.csv"), predictions_csv(pred));
  write_text_file(in_dir(out, "config.json"), snapshot(cfg, "predict"));
}

void cmd_benchmark(const CliConfig& cfg, const std::string& out) {
  BenchmarkConfig bc;
  bc.runs = cfg.runs;
  bc.seed = cfg.seed;
  bc.design.n = cfg.n;
  bc.mechanism = parse_mechanism(cfg.mechanism);
  bc.rate = cfg.rate;
  bc.test_fraction = cfg.test_fraction;
  bc.methods.clear();
  for (const auto& m : cfg.methods) bc.methods.push_back(parse_method(m));
  bc.saem = cfg.saem;
  bc.baseline_ridge = cfg.baseline_ridge;
  bc.threads = cfg.threads;
  prepare_dir(out);
  const auto report = run_benchmark(bc);
  write_benchmark_report(report, out, snapshot(cfg, "benchmark"));
  std::cout << bias_rmse_table(report) << "\n" << metrics_summary_table(report);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SAEM logistic regression with missing hybrid covariates"};
  app.require_subcommand(1);

  std::string config_path, out_dir, data_path, schema_path, params_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> method, mechanism;
  std::optional<double> rate;
  std::optional<int> runs;
  std::optional<unsigned> threads;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "master seed");
    sub->add_option("--out-dir", out_dir, "output directory")->required();
    sub->add_option("--threads", threads, "worker threads");
  };
  auto data_opts = [&](CLI::App* sub) {
    sub->add_option("--data", data_path, "input CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--schema", schema_path, "schema JSON (default: schema.json next to --data)");
  };

  auto* sim = app.add_subcommand("simulate", "draw the synthetic dataset");
  common(sim);
  auto* inj = app.add_subcommand("inject", "mask cells of a dataset");
  common(inj);
  data_opts(inj);
  inj->add_option("--mechanism", mechanism)->check(CLI::IsMember({"mcar", "mar"}));
  inj->add_option("--rate", rate)->check(CLI::Range(0.0, 1.0));
  auto* fit = app.add_subcommand("fit", "estimate parameters");
  common(fit);
  data_opts(fit);
  fit->add_option("--method", method)->check(CLI::IsMember(kMethods));
  auto* pred = app.add_subcommand("predict", "score a dataset with fitted parameters");
  common(pred);
  data_opts(pred);
  pred->add_option("--params", params_path, "params JSON from fit")->required()->check(
      CLI::ExistingFile);
  auto* bench = app.add_subcommand("benchmark", "replicated simulation study");
  common(bench);
  bench->add_option("--mechanism", mechanism)->check(CLI::IsMember({"mcar", "mar"}));
  bench->add_option("--rate", rate)->check(CLI::Range(0.0, 1.0));
  bench->add_option("--runs", runs)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    CliConfig cfg;
    if (!config_path.empty()) load_config(cfg, config_path);
    if (seed) cfg.seed = *seed;
    if (method) cfg.method = *method;
    if (mechanism) cfg.mechanism = *mechanism;
    if (rate) cfg.rate = *rate;
    if (runs) cfg.runs = *runs;
    if (threads) {
      cfg.threads = *threads;
      cfg.saem.threads = *threads;
    }
    if (std::find(kMethods.begin(), kMethods.end(), cfg.method) == kMethods.end())
      throw DataError("unknown method '" + cfg.method + "'");

    if (sim->parsed()) cmd_simulate(cfg, out_dir);
    else if (inj->parsed()) cmd_inject(cfg, data_path, schema_path, out_dir);
    else if (fit->parsed()) cmd_fit(cfg, data_path, schema_path, out_dir);
    else if (pred->parsed()) cmd_predict(cfg, data_path, schema_path, params_path, out_dir);
    else if (bench->parsed()) cmd_benchmark(cfg, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "mixsaem: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
