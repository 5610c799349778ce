#include "mixsaem/benchmark.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "mixsaem/baselines.hpp"
#include "mixsaem/params_io.hpp"
#include "mixsaem/parallel.hpp"
#include "mixsaem/prediction.hpp"

namespace mixsaem {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fixed(double v, int digits = 4) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<double> logistic_probabilities(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
  std::vector<double> out(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i)
    out[static_cast<std::size_t>(i)] = sigmoid_logodds(beta, X.row(i).transpose());
  return out;
}

std::optional<double> metric_of(const ClassificationMetrics& m, const std::string& name) {
  if (name == "auc") return m.auc;
  if (name == "accuracy") return m.accuracy;
  if (name == "precision") return m.precision;
  if (name == "sensitivity") return m.sensitivity;
  if (name == "specificity") return m.specificity;
  if (name == "f1") return m.f1;
  if (name == "brier") return m.brier;
  throw DataError("unknown metric '" + name + "'");
}

const std::vector<std::string>& metric_labels() {
  static const std::vector<std::string> labels{"AUC",         "Accuracy", "Precision",
                                               "Sensitivity", "Specificity", "F1 score",
                                               "Brier score"};
  return labels;
}

MissingnessSpec missingness_plan(const BenchmarkConfig& cfg, std::uint64_t seed) {
  const auto p = cfg.design.discrete_probs.size() + static_cast<std::size_t>(cfg.design.mean.size());
  if (cfg.mechanism == Mechanism::MCAR) {
    MissingnessSpec s = reference_mcar(cfg.rate, seed);
    s.target_columns.resize(p);
    for (std::size_t j = 0; j < p; ++j) s.target_columns[j] = j;
    return s;
  }
  if (p < 7) throw DataError("benchmark: the MAR plan needs the 7-covariate reference layout");
  return reference_mar(cfg.rate, seed);
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Saem: return "saem";
    case Method::SaemSmoothed: return "saem-smoothed";
    case Method::MeanMode: return "mm";
    case Method::CompleteCase: return "cc";
    case Method::Full: return "full";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (const auto m : {Method::Saem, Method::SaemSmoothed, Method::MeanMode, Method::CompleteCase,
                       Method::Full})
    if (method_name(m) == name) return m;
  throw DataError("unknown method '" + name + "'");
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"auc",         "accuracy", "precision",
                                              "sensitivity", "specificity", "f1",
                                              "brier"};
  return names;
}

std::vector<std::vector<double>> BenchmarkReport::estimates(Method m) const {
  std::vector<std::vector<double>> out;
  for (const auto& r : runs)
    for (const auto& mr : r.methods)
      if (mr.method == m && !mr.beta.empty()) out.push_back(mr.beta);
  return out;
}

std::vector<double> BenchmarkReport::metric_values(Method m, const std::string& metric) const {
  std::vector<double> out;
  for (const auto& r : runs)
    for (const auto& mr : r.methods)
      if (mr.method == m && mr.metrics)
        if (const auto v = metric_of(*mr.metrics, metric)) out.push_back(*v);
  return out;
}

ReplicationResult run_replication(const BenchmarkConfig& cfg, int run) {
  ReplicationResult rep;
  rep.run = run;
  const auto r = static_cast<std::uint64_t>(run);
  auto seed = [&](const char* stage) { return derive_seed(cfg.seed, {r, stage_tag(stage)}); };

  auto t0 = Clock::now();
  const auto full = simulate(cfg.design, seed("simulate"));
  auto [train_full, test_full] = split_train_test(full, cfg.test_fraction, seed("split"));
  const auto train = inject(train_full, missingness_plan(cfg, seed("inject-train")));
  const auto test = inject(test_full, missingness_plan(cfg, seed("inject-test")));
  rep.stage_seconds["data"] = seconds_since(t0);
  rep.train_missing_fraction = static_cast<double>(train.missing_count()) /
                               static_cast<double>(train.values().size());
  rep.test_labels = test.outcomes();

  const auto encoding = cfg.saem.encoding;
  LogisticFitOptions baseline{};
  baseline.ridge = cfg.baseline_ridge;

  for (const auto method : cfg.methods) {
    MethodRun mr;
    mr.method = method;
    try {
      auto fit_start = Clock::now();
      Eigen::VectorXd beta;
      std::vector<double> probs;
      double fit_seconds = 0.0;
      auto predict_start = Clock::now();
      switch (method) {
        case Method::Saem:
        case Method::SaemSmoothed: {
          SaemConfig sc = cfg.saem;
          sc.seed = seed(method == Method::Saem ? "saem" : "saem-smoothed");
          if (method == Method::SaemSmoothed) sc.beta_objective = BetaObjective::SmoothedWeights;
          const auto fit = fit_saem(train, sc);
          beta = fit.params.beta;
          fit_seconds = seconds_since(fit_start);
          predict_start = Clock::now();
          probs = predict_dataset(test, fit.params, sc.prediction_samples, seed("predict")).probabilities;
          break;
        }
        case Method::MeanMode: {
          beta = fit_logistic(covariate_matrix(impute_mean_mode(train), encoding),
                              outcome_vector(train), baseline);
          fit_seconds = seconds_since(fit_start);
          predict_start = Clock::now();
          probs = logistic_probabilities(covariate_matrix(impute_mean_mode(test), encoding), beta);
          break;
        }
        case Method::CompleteCase: {
          const auto cc = complete_cases(train);
          beta = fit_logistic(covariate_matrix(cc, encoding), outcome_vector(cc), baseline);
          fit_seconds = seconds_since(fit_start);
          predict_start = Clock::now();
          probs = logistic_probabilities(covariate_matrix(impute_mean_mode(test), encoding), beta);
          break;
        }
        case Method::Full: {
          beta = fit_logistic(covariate_matrix(train_full, encoding), outcome_vector(train_full),
                              baseline);
          fit_seconds = seconds_since(fit_start);
          predict_start = Clock::now();
          probs = logistic_probabilities(covariate_matrix(test_full, encoding), beta);
          break;
        }
      }
      mr.fit_seconds = fit_seconds;
      mr.beta.assign(beta.data(), beta.data() + beta.size());
      mr.probabilities = probs;
      mr.metrics = classification_metrics(probs, rep.test_labels);
      mr.predict_seconds = seconds_since(predict_start);
    } catch (const Error& e) {
      mr.error = e.what();
    }
    rep.methods.push_back(std::move(mr));
  }
  return rep;
}

BenchmarkReport run_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.runs < 1) throw DataError("benchmark: runs must be >= 1");
  BenchmarkReport report;
  report.config = cfg;
  report.runs.resize(static_cast<std::size_t>(cfg.runs));
  parallel_for(report.runs.size(), cfg.threads, [&](std::size_t r) {
    report.runs[r] = run_replication(cfg, static_cast<int>(r));
  });
  return report;
}

std::string runs_long_csv(const BenchmarkReport& report) {
  const auto& truth = report.config.design.beta;
  std::string out = "run,method,metric,value\n";
  for (const auto& r : report.runs)
    for (const auto& mr : r.methods) {
      const auto prefix = std::to_string(r.run) + "," + method_name(mr.method) + ",";
      if (!mr.beta.empty()) {
        double norm = 0.0, err = 0.0;
        for (std::size_t j = 0; j < mr.beta.size(); ++j) {
          const double d = mr.beta[j] - truth(static_cast<Eigen::Index>(j));
          out += prefix + "beta_" + std::to_string(j) + "," + num(mr.beta[j]) + "\n";
          out += prefix + "bias_" + std::to_string(j) + "," + num(d) + "\n";
          norm += mr.beta[j] * mr.beta[j];
          err += d * d;
        }
        out += prefix + "beta_norm," + num(std::sqrt(norm)) + "\n";
        out += prefix + "beta_error_norm," + num(std::sqrt(err)) + "\n";
      }
      if (mr.metrics)
        for (const auto& name : metric_names())
          if (const auto v = metric_of(*mr.metrics, name)) out += prefix + name + "," + num(*v) + "\n";
      if (!mr.error.empty()) {
        std::string msg = mr.error;
        for (auto& c : msg)
          if (c == ',' || c == '\n' || c == '"') c = ' ';
        out += prefix + "error," + msg + "\n";
      }
    }
  return out;
}

std::string bias_rmse_csv(const BenchmarkReport& report) {
  const auto& truth = report.config.design.beta;
  const std::vector<double> t(truth.data(), truth.data() + truth.size());
  std::string out = "coefficient,truth,method,bias,rmse,runs\n";
  for (const auto m : report.config.methods) {
    const auto est = report.estimates(m);
    const auto em = estimation_metrics(est, t);
    for (std::size_t j = 0; j < t.size(); ++j)
      out += "beta_" + std::to_string(j + 1) + "," + num(t[j]) + "," + method_name(m) + "," +
             (est.empty() ? "NA" : num(em.bias[j])) + "," + (est.empty() ? "NA" : num(em.rmse[j])) +
             "," + std::to_string(est.size()) + "\n";
    const auto norms = summarize(em.norms);
    const auto errs = summarize(em.error_norms);
    out += "norm,NA," + method_name(m) + "," + num(norms.mean) + "," + num(norms.sd) + "," +
           std::to_string(est.size()) + "\n";
    out += "error_norm,NA," + method_name(m) + "," + num(errs.mean) + "," + num(errs.sd) + "," +
           std::to_string(est.size()) + "\n";
  }
  return out;
}

std::string bias_rmse_table(const BenchmarkReport& report) {
  const auto& truth = report.config.design.beta;
  const std::vector<double> t(truth.data(), truth.data() + truth.size());
  std::vector<EstimationMetrics> ems;
  for (const auto m : report.config.methods) ems.push_back(estimation_metrics(report.estimates(m), t));
  char buf[64];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-8s %-8s", "beta", "metric");
  out += buf;
  for (const auto m : report.config.methods) {
    std::snprintf(buf, sizeof buf, " %12s", method_name(m).c_str());
    out += buf;
  }
  out += "\n";
  for (std::size_t j = 0; j < t.size(); ++j) {
    for (const char* which : {"Bias", "RMSE"}) {
      std::snprintf(buf, sizeof buf, "%-8s %-8s",
                    which[0] == 'B' ? ("beta_" + std::to_string(j + 1)).c_str() : "", which);
      out += buf;
      for (const auto& em : ems) {
        const double v = which[0] == 'B' ? em.bias[j] : em.rmse[j];
        std::snprintf(buf, sizeof buf, " %12s", em.norms.empty() ? "NA" : fixed(v).c_str());
        out += buf;
      }
      out += "\n";
    }
  }
  for (const char* which : {"|beta|", "|err|"}) {
    std::snprintf(buf, sizeof buf, "%-8s %-8s", which, "mean");
    out += buf;
    for (const auto& em : ems) {
      const auto s = summarize(which[1] == 'b' ? em.norms : em.error_norms);
      std::snprintf(buf, sizeof buf, " %12s", s.count == 0 ? "NA" : fixed(s.mean).c_str());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string metrics_summary_csv(const BenchmarkReport& report) {
  std::string out = "metric,method,mean,sd,runs\n";
  const auto& names = metric_names();
  for (std::size_t k = 0; k < names.size(); ++k)
    for (const auto m : report.config.methods) {
      const auto s = summarize(report.metric_values(m, names[k]));
      out += metric_labels()[k] + "," + method_name(m) + "," + (s.count ? num(s.mean) : "NA") + "," +
             (s.count ? num(s.sd) : "NA") + "," + std::to_string(s.count) + "\n";
    }
  return out;
}

std::string metrics_summary_table(const BenchmarkReport& report) {
  char buf[64];
  std::string out;
  std::snprintf(buf, sizeof buf, "%-12s", "Metric");
  out += buf;
  for (const auto m : report.config.methods) {
    std::snprintf(buf, sizeof buf, " %18s", method_name(m).c_str());
    out += buf;
  }
  out += "\n";
  const auto& names = metric_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%-12s", metric_labels()[k].c_str());
    out += buf;
    for (const auto m : report.config.methods) {
      const auto s = summarize(report.metric_values(m, names[k]));
      const std::string cell =
          s.count ? fixed(s.mean, 3) + " (" + fixed(s.sd, 3) + ")" : std::string("NA");
      std::snprintf(buf, sizeof buf, " %18s", cell.c_str());
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string timings_csv(const BenchmarkReport& report) {
  std::string out = "run,method,stage,seconds\n";
  for (const auto& r : report.runs) {
    for (const auto& [stage, s] : r.stage_seconds)
      out += std::to_string(r.run) + ",all," + stage + "," + num(s) + "\n";
    for (const auto& mr : r.methods) {
      out += std::to_string(r.run) + "," + method_name(mr.method) + ",fit," + num(mr.fit_seconds) + "\n";
      out += std::to_string(r.run) + "," + method_name(mr.method) + ",predict," +
             num(mr.predict_seconds) + "\n";
    }
  }
  return out;
}

std::string roc_csv(const BenchmarkReport& report) {
  std::string out = "run,method,threshold,fpr,tpr\n";
  for (const auto& r : report.runs)
    for (const auto& mr : r.methods) {
      if (!mr.metrics) continue;
      for (const auto& pt : roc_curve(mr.probabilities, r.test_labels))
        out += std::to_string(r.run) + "," + method_name(mr.method) + "," +
               (std::isinf(pt.threshold) ? std::string("Inf") : num(pt.threshold)) + "," +
               num(pt.fpr) + "," + num(pt.tpr) + "\n";
    }
  return out;
}

void write_benchmark_report(const BenchmarkReport& report, const std::string& dir,
                            const std::string& config_snapshot) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  write_text_file((d / "runs_long.csv").string(), runs_long_csv(report));
  write_text_file((d / "bias_rmse.csv").string(), bias_rmse_csv(report));
  write_text_file((d / "bias_rmse.txt").string(), bias_rmse_table(report));
  write_text_file((d / "metrics_summary.csv").string(), metrics_summary_csv(report));
  write_text_file((d / "metrics_summary.txt").string(), metrics_summary_table(report));
  write_text_file((d / "timings.csv").string(), timings_csv(report));
  write_text_file((d / "roc.csv").string(), roc_csv(report));
  write_text_file((d / "config.json").string(), config_snapshot);
}

}  // namespace mixsaem
