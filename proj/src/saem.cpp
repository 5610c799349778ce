#include "mixsaem/saem.hpp"

#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>

#include "mixsaem/parallel.hpp"

namespace mixsaem {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<SampleView> all_samples(const HybridDataset& ds) {
  std::vector<SampleView> out;
  out.reserve(ds.rows());
  for (std::size_t i = 0; i < ds.rows(); ++i) out.push_back(sample_view(ds, i));
  return out;
}

}  // namespace

double logistic_loglik_term(const ModelParams& params, int y, const std::vector<int>& discrete,
                            const Eigen::VectorXd& continuous) {
  if (discrete.size() != params.num_discrete() ||
      static_cast<std::size_t>(continuous.size()) != params.num_continuous())
    throw DataError("complete_loglik: covariate dimensions do not match the model");
  return bernoulli_logit_loglik(y, params.linear_predictor(discrete, continuous));
}

double discrete_loglik_term(const ModelParams& params, const std::vector<int>& discrete) {
  double out = 0.0;
  for (std::size_t j = 0; j < discrete.size(); ++j)
    out += categorical_logpmf(params.discretes.at(j), discrete[j]);
  return out;
}

double continuous_loglik_term(const ModelParams& params, const Eigen::VectorXd& continuous) {
  if (params.num_continuous() == 0) return 0.0;
  return gaussian_logpdf(params.gaussian, continuous);
}

double complete_loglik(const ModelParams& params, int y, const std::vector<int>& discrete,
                       const Eigen::VectorXd& continuous) {
  return logistic_loglik_term(params, y, discrete, continuous) +
         discrete_loglik_term(params, discrete) + continuous_loglik_term(params, continuous);
}

double observed_loglik_sample(const ModelParams& params, const SampleView& sample, int n_mc,
                              Rng& rng) {
  if (sample.complete()) return complete_loglik(params, sample.y, sample.discrete, sample.continuous);
  if (n_mc < 1) throw DataError("observed_loglik_estimate: n_mc must be >= 1");

  double out = 0.0;
  for (const auto j : sample.obs_discrete)
    out += categorical_logpmf(params.discretes[j], sample.discrete[j]);
  Eigen::VectorXd obs_vals(static_cast<Eigen::Index>(sample.obs_continuous.size()));
  for (std::size_t a = 0; a < sample.obs_continuous.size(); ++a)
    obs_vals(static_cast<Eigen::Index>(a)) =
        sample.continuous(static_cast<Eigen::Index>(sample.obs_continuous[a]));
  if (params.num_continuous() > 0)
    out += gaussian_marginal_logpdf(params.gaussian, sample.obs_continuous, obs_vals);

  const SampleTarget target(sample, params);
  if (target.missing_dim() == 0) return out + target.outcome_loglik(Eigen::VectorXd());
  std::vector<double> terms(static_cast<std::size_t>(n_mc));
  for (auto& term : terms) term = target.outcome_loglik(target.proposal().sample(rng));
  return out + log_sum_exp(terms) - std::log(static_cast<double>(n_mc));
}

double observed_loglik_estimate(const ModelParams& params, const HybridDataset& ds, int n_mc,
                                std::uint64_t seed) {
  double total = 0.0;
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    Rng rng(derive_seed(seed, {i}));
    total += observed_loglik_sample(params, sample_view(ds, i), n_mc, rng);
  }
  return total;
}

Eigen::VectorXd DiscretePosterior::marginal(std::size_t a) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(radix.at(a));
  std::size_t stride = 1;
  for (std::size_t b = 0; b < a; ++b) stride *= static_cast<std::size_t>(radix[b]);
  const auto m = static_cast<std::size_t>(radix[a]);
  for (std::size_t k = 0; k < weights.size(); ++k)
    out(static_cast<Eigen::Index>((k / stride) % m)) += weights[k];
  return out;
}

DiscretePosterior discrete_posterior(const SampleView& sample, const Eigen::VectorXd& continuous,
                                     const ModelParams& params) {
  const ComboTable table = build_combo_table(sample, params);
  DiscretePosterior out;
  out.coords = table.coords;
  out.radix = table.radix;
  if (table.size() == 1) {
    out.weights = {1.0};
    return out;
  }
  double eta = params.beta(0) + params.continuous_beta().dot(continuous);
  for (const auto j : sample.obs_discrete) eta += params.discrete_term(j, sample.discrete[j]);
  std::vector<double> logw(table.size());
  for (std::size_t k = 0; k < table.size(); ++k)
    logw[k] = bernoulli_logit_loglik(sample.y, eta + table.eta_offset[k]) + table.log_prior[k];
  const double norm = log_sum_exp(logw);
  out.weights.resize(table.size());
  for (std::size_t k = 0; k < table.size(); ++k) out.weights[k] = std::exp(logw[k] - norm);
  return out;
}

SufficientStats sufficient_stats(const Eigen::MatrixXd& completed) {
  SufficientStats s;
  const auto n = static_cast<double>(completed.rows());
  s.t1 = completed.colwise().sum().transpose() / n;
  s.t2 = completed.transpose() * completed;
  return s;
}

SufficientStats sa_update_stats(const std::optional<SufficientStats>& prev,
                                const Eigen::MatrixXd& completed, double delta) {
  SufficientStats fresh = sufficient_stats(completed);
  if (!prev || delta == 1.0) return fresh;
  if (prev->t1.size() != fresh.t1.size()) throw DataError("sa_update_stats: dimension mismatch");
  SufficientStats out;
  out.t1 = prev->t1 + delta * (fresh.t1 - prev->t1);
  out.t2 = prev->t2 + delta * (fresh.t2 - prev->t2);
  return out;
}

std::vector<DiscretePosterior> sa_update_weights(const std::vector<DiscretePosterior>& prev,
                                                 const std::vector<DiscretePosterior>& fresh,
                                                 double delta) {
  if (prev.size() != fresh.size()) throw DataError("sa_update_weights: sample count mismatch");
  std::vector<DiscretePosterior> out = prev;
  for (std::size_t i = 0; i < prev.size(); ++i) {
    if (prev[i].coords != fresh[i].coords || prev[i].radix != fresh[i].radix ||
        prev[i].size() != fresh[i].size())
      throw DataError("sa_update_weights: support mismatch at sample " + std::to_string(i));
    if (delta == 1.0) {
      out[i].weights = fresh[i].weights;
      continue;
    }
    for (std::size_t k = 0; k < prev[i].size(); ++k)
      out[i].weights[k] = prev[i].weights[k] + delta * (fresh[i].weights[k] - prev[i].weights[k]);
  }
  return out;
}

WeightedLogisticProblem expanded_beta_problem(const std::vector<SampleView>& samples,
                                              std::span<const BetaObjectiveBlock> blocks,
                                              const ModelParams& params, double ridge) {
  Eigen::Index rows = 0;
  for (const auto& b : blocks) {
    if (b.weights->size() != samples.size() ||
        static_cast<std::size_t>(b.completed->rows()) != samples.size())
      throw DataError("mstep_beta: imputations/weights do not match the sample count");
    for (const auto& w : *b.weights) rows += static_cast<Eigen::Index>(w.size());
  }
  WeightedLogisticProblem problem;
  problem.design.resize(rows, params.beta.size());
  problem.y.resize(rows);
  problem.weights.resize(rows);
  problem.ridge = ridge;
  problem.penalize_intercept = true;

  Eigen::Index r = 0;
  for (const auto& b : blocks) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      const auto& w = (*b.weights)[i];
      const Eigen::VectorXd xc = b.completed->row(static_cast<Eigen::Index>(i)).transpose();
      std::vector<int> discrete = s.discrete;
      for (std::size_t k = 0; k < w.size(); ++k) {
        std::size_t rem = k;
        for (std::size_t a = 0; a < w.coords.size(); ++a) {
          const auto m = static_cast<std::size_t>(w.radix[a]);
          discrete[w.coords[a]] = static_cast<int>(rem % m) + 1;
          rem /= m;
        }
        problem.design.row(r) = params.design_row(discrete, xc).transpose();
        problem.y(r) = s.y;
        problem.weights(r) = b.coefficient * w.weights[k];
        ++r;
      }
    }
  }
  return problem;
}

Eigen::VectorXd mstep_beta(const std::vector<SampleView>& samples,
                           const Eigen::MatrixXd& completed,
                           const std::vector<DiscretePosterior>& weights,
                           const ModelParams& params, const Eigen::VectorXd& warm_start,
                           const BetaOptimizerConfig& cfg) {
  const BetaObjectiveBlock block{&completed, &weights, 1.0};
  const auto problem =
      expanded_beta_problem(samples, std::span<const BetaObjectiveBlock>(&block, 1), params,
                            cfg.ridge);
  const auto result = maximize_weighted_logistic(
      problem, warm_start, NewtonOptions{cfg.max_iterations, cfg.gradient_tolerance});
  if (!result.beta.allFinite()) throw ConvergenceError("mstep_beta: non-finite coefficients");
  return result.beta;
}

GaussianParams mstep_gaussian(const SufficientStats& stats, std::size_t n) {
  GaussianParams g;
  g.mean = stats.t1;
  const Eigen::MatrixXd cov = stats.t2 / static_cast<double>(n) - stats.t1 * stats.t1.transpose();
  g.cov = stats.t1.size() == 0 ? cov : repair_covariance(cov);
  return g;
}

std::vector<CategoricalParams> mstep_discrete(const std::vector<SampleView>& samples,
                                              const std::vector<DiscretePosterior>& weights,
                                              const std::vector<int>& levels) {
  if (weights.size() != samples.size())
    throw DataError("mstep_discrete: weights do not match the sample count");
  std::vector<Eigen::VectorXd> counts;
  for (const int m : levels) counts.push_back(Eigen::VectorXd::Zero(m));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    for (const auto j : s.obs_discrete) counts[j](s.discrete[j] - 1) += 1.0;
    const auto& w = weights[i];
    for (std::size_t a = 0; a < w.coords.size(); ++a) counts[w.coords[a]] += w.marginal(a);
  }
  std::vector<CategoricalParams> out;
  const auto n = static_cast<double>(samples.size());
  for (auto& c : counts) out.push_back(CategoricalParams{c / n});
  return out;
}

double step_size(int t, const SaemConfig& cfg) {
  if (t <= cfg.burn_in) return 1.0;
  const double base = cfg.step_rule == StepRule::Shifted ? static_cast<double>(t - cfg.burn_in)
                                                         : static_cast<double>(t + cfg.burn_in);
  return std::pow(base, -cfg.tau);
}

ModelParams initial_params(const HybridDataset& ds, DiscreteEncoding encoding) {
  const auto l = ds.num_discrete();
  const auto h = ds.num_continuous();
  const auto n = ds.rows();
  const auto levels = ds.schema().discrete_levels();
  ModelParams p;
  p.encoding = encoding;
  p.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(design_size(encoding, levels, h)));

  for (std::size_t j = 0; j < l; ++j) {
    Eigen::VectorXd counts = Eigen::VectorXd::Ones(levels[j]);
    for (std::size_t i = 0; i < n; ++i)
      if (ds.observed(i, j))
        counts(static_cast<Eigen::Index>(ds.values()(static_cast<Eigen::Index>(i),
                                                      static_cast<Eigen::Index>(j))) - 1) += 1.0;
    p.discretes.push_back(CategoricalParams{counts / counts.sum()});
  }

  const auto H = static_cast<Eigen::Index>(h);
  p.gaussian.mean = Eigen::VectorXd::Zero(H);
  p.gaussian.cov = Eigen::MatrixXd::Identity(H, H);
  auto col = [&](std::size_t k) { return static_cast<Eigen::Index>(l + k); };
  for (Eigen::Index a = 0; a < H; ++a) {
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (ds.observed(i, static_cast<std::size_t>(col(static_cast<std::size_t>(a))))) {
        sum += ds.values()(static_cast<Eigen::Index>(i), col(static_cast<std::size_t>(a)));
        ++count;
      }
    if (count > 0) p.gaussian.mean(a) = sum / static_cast<double>(count);
  }
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(H, H);
  for (Eigen::Index a = 0; a < H; ++a)
    for (Eigen::Index b = 0; b <= a; ++b) {
      double acc = 0.0;
      std::size_t count = 0;
      const auto ca = col(static_cast<std::size_t>(a));
      const auto cb = col(static_cast<std::size_t>(b));
      for (std::size_t i = 0; i < n; ++i)
        if (ds.mask()(static_cast<Eigen::Index>(i), ca) && ds.mask()(static_cast<Eigen::Index>(i), cb)) {
          acc += (ds.values()(static_cast<Eigen::Index>(i), ca) - p.gaussian.mean(a)) *
                 (ds.values()(static_cast<Eigen::Index>(i), cb) - p.gaussian.mean(b));
          ++count;
        }
      const double v = count > 1 ? acc / static_cast<double>(count) : (a == b ? 1.0 : 0.0);
      cov(a, b) = v;
      cov(b, a) = v;
    }
  for (Eigen::Index a = 0; a < H; ++a)
    if (!(cov(a, a) > 0.0)) cov(a, a) = 1.0;
  try {
    p.gaussian.cov = repair_covariance(cov);
  } catch (const NotSpdError&) {
    p.gaussian.cov = cov.diagonal().asDiagonal();
  }
  return p;
}

FitResult fit_saem(const HybridDataset& train, const SaemConfig& cfg) {
  const auto n = train.rows();
  const auto l = train.num_discrete();
  const auto h = train.num_continuous();
  if (n < h + l + 2)
    throw DataError("fit_saem: need at least h + l + 2 = " + std::to_string(h + l + 2) +
                    " samples, got " + std::to_string(n));
  std::size_t positives = 0;
  for (const int y : train.outcomes()) positives += static_cast<std::size_t>(y);
  if (positives == 0 || positives == n)
    throw DataError("fit_saem: both outcome classes must be present");
  if (cfg.iterations < 1) throw DataError("fit_saem: iterations must be >= 1");
  if (cfg.beta_objective == BetaObjective::Replay && cfg.replay_window < 1)
    throw DataError("fit_saem: replay window must be >= 1");

  const auto samples = all_samples(train);
  const auto levels = train.schema().discrete_levels();
  for (const auto& s : samples) combo_count(s, levels);

  FitResult result;
  ModelParams params = initial_params(train, cfg.encoding);
  const auto H = static_cast<Eigen::Index>(h);
  Eigen::MatrixXd completed(static_cast<Eigen::Index>(n), H);
  std::optional<SufficientStats> stats;
  std::vector<DiscretePosterior> weights;
  std::vector<DiscretePosterior> fresh(n);
  std::vector<MhDiagnostics> diagnostics(n);

  struct ReplayEntry {
    Eigen::MatrixXd completed;
    std::vector<DiscretePosterior> weights;
    double coefficient;
  };
  std::deque<ReplayEntry> replay;

  const auto mh_tag = stage_tag("mh");
  const auto loglik_seed = derive_seed(cfg.seed, {stage_tag("trajectory-loglik")});

  for (int t = 1; t <= cfg.iterations; ++t) {
    const double delta = step_size(t, cfg);

    // S-step under theta^(t-1).
    parallel_for(n, cfg.threads, [&](std::size_t i) {
      const auto& s = samples[i];
      Eigen::VectorXd xc = s.continuous;
      diagnostics[i] = MhDiagnostics{};
      if (!s.mis_continuous.empty()) {
        Rng rng(derive_seed(cfg.seed, {mh_tag, static_cast<std::uint64_t>(t), i}));
        const SampleTarget target(s, params);
        auto draw = mh_sample(target, cfg.mh, rng);
        xc = completed_continuous(s, draw.x_mis);
        diagnostics[i] = draw.diagnostics;
      }
      if (H > 0) completed.row(static_cast<Eigen::Index>(i)) = xc.transpose();
      fresh[i] = discrete_posterior(s, xc, params);
    });

    // SA-step.
    stats = sa_update_stats(stats, completed, delta);
    weights = t == 1 ? fresh : sa_update_weights(weights, fresh, delta);

    // M-step.
    ModelParams next = params;
    if (cfg.beta_objective == BetaObjective::SmoothedWeights) {
      next.beta = mstep_beta(samples, completed, weights, params, params.beta, cfg.beta_optimizer);
    } else {
      for (auto& e : replay) e.coefficient *= 1.0 - delta;
      replay.push_back({completed, fresh, delta});
      while (replay.size() > static_cast<std::size_t>(cfg.replay_window)) replay.pop_front();
      double total = 0.0;
      for (const auto& e : replay) total += e.coefficient;
      std::vector<BetaObjectiveBlock> blocks;
      for (const auto& e : replay)
        if (e.coefficient > 0.0)
          blocks.push_back({&e.completed, &e.weights, e.coefficient / total});
      const auto problem = expanded_beta_problem(samples, blocks, params, cfg.beta_optimizer.ridge);
      next.beta = maximize_weighted_logistic(problem, params.beta,
                                             NewtonOptions{cfg.beta_optimizer.max_iterations,
                                                           cfg.beta_optimizer.gradient_tolerance})
                      .beta;
    }
    next.gaussian = mstep_gaussian(*stats, n);
    next.discretes = mstep_discrete(samples, weights, levels);
    params = std::move(next);

    MhDiagnostics iteration_diag;
    for (const auto& d : diagnostics) iteration_diag += d;
    result.mh_total += iteration_diag;

    IterationRecord rec;
    rec.iteration = t;
    rec.delta = delta;
    rec.beta = params.beta;
    rec.acceptance_rate = iteration_diag.acceptance_rate();
    rec.loglik = cfg.trajectory_loglik_samples > 0
                     ? observed_loglik_estimate(params, train, cfg.trajectory_loglik_samples,
                                                loglik_seed)
                     : kNaN;
    result.trajectory.push_back(std::move(rec));
    if (cfg.keep_param_history) result.param_history.push_back(params);
  }
  result.params = std::move(params);
  result.iterations = cfg.iterations;
  return result;
}

std::string trajectory_csv(const FitResult& fit) {
  std::string out = "iteration,delta";
  const auto p = fit.params.beta.size();
  for (Eigen::Index k = 0; k < p; ++k) out += ",beta_" + std::to_string(k);
  out += ",loglik,acceptance_rate\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : fit.trajectory) {
    out += std::to_string(r.iteration) + "," + num(r.delta);
    for (Eigen::Index k = 0; k < r.beta.size(); ++k) out += "," + num(r.beta(k));
    out += "," + (std::isnan(r.loglik) ? std::string("NA") : num(r.loglik));
    out += "," + num(r.acceptance_rate) + "\n";
  }
  return out;
}

}  // namespace mixsaem
