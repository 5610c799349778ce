#include "mixsaem/prediction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "mixsaem/parallel.hpp"

namespace mixsaem {

ClassScores predict_scores(const SampleView& sample, const ModelParams& params, int mc_samples,
                           Rng& rng) {
  if (mc_samples < 1) throw DataError("predict: number of Monte-Carlo samples must be >= 1");
  const ComboTable combos = build_combo_table(sample, params);
  std::vector<double> prior(combos.size());
  for (std::size_t k = 0; k < combos.size(); ++k) prior[k] = std::exp(combos.log_prior[k]);

  const Eigen::VectorXd beta_c = params.continuous_beta();
  double eta_obs = params.beta(0);
  for (const auto j : sample.obs_discrete) eta_obs += params.discrete_term(j, sample.discrete[j]);
  Eigen::VectorXd obs_vals(static_cast<Eigen::Index>(sample.obs_continuous.size()));
  for (std::size_t a = 0; a < sample.obs_continuous.size(); ++a) {
    const auto k = static_cast<Eigen::Index>(sample.obs_continuous[a]);
    obs_vals(static_cast<Eigen::Index>(a)) = sample.continuous(k);
    eta_obs += beta_c(k) * sample.continuous(k);
  }

  auto accumulate = [&](double eta, ClassScores& scores) {
    for (std::size_t k = 0; k < combos.size(); ++k) {
      const double p1 = sigmoid(eta + combos.eta_offset[k]);
      scores.score1 += prior[k] * p1;
      scores.score0 += prior[k] * (1.0 - p1);
    }
  };

  ClassScores scores;
  if (sample.mis_continuous.empty()) {
    scores.draws = 1;
    accumulate(eta_obs, scores);
    return scores;
  }
  const auto cond = gaussian_conditional(params.gaussian, sample.obs_continuous, obs_vals,
                                         sample.mis_continuous);
  Eigen::VectorXd beta_mis(static_cast<Eigen::Index>(sample.mis_continuous.size()));
  for (std::size_t a = 0; a < sample.mis_continuous.size(); ++a)
    beta_mis(static_cast<Eigen::Index>(a)) =
        beta_c(static_cast<Eigen::Index>(sample.mis_continuous[a]));
  scores.draws = mc_samples;
  for (int s = 0; s < mc_samples; ++s) accumulate(eta_obs + beta_mis.dot(cond.sample(rng)), scores);
  return scores;
}

double predict_proba(const SampleView& sample, const ModelParams& params, int mc_samples,
                     Rng& rng) {
  if (sample.complete()) {
    if (mc_samples < 1) throw DataError("predict: number of Monte-Carlo samples must be >= 1");
    const Eigen::VectorXd row = params.design_row(sample.discrete, sample.continuous);
    return sigmoid_logodds(params.beta, row.tail(row.size() - 1));
  }
  const auto scores = predict_scores(sample, params, mc_samples, rng);
  const double p = scores.score1 / static_cast<double>(scores.draws);
  return std::clamp(p, 0.0, 1.0);
}

int class_from_probability(double p, double threshold) { return p >= threshold ? 1 : 0; }

int predict_class(const SampleView& sample, const ModelParams& params, int mc_samples, Rng& rng,
                  double threshold) {
  return class_from_probability(predict_proba(sample, params, mc_samples, rng), threshold);
}

PredictionOutput predict_dataset(const HybridDataset& ds, const ModelParams& params,
                                 int mc_samples, std::uint64_t seed, double threshold,
                                 unsigned threads) {
  PredictionOutput out;
  const auto n = ds.rows();
  out.probabilities.resize(n);
  out.classes.resize(n);
  out.draws.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    Rng rng(derive_seed(seed, {i}));
    const auto sample = sample_view(ds, i);
    const double p = predict_proba(sample, params, mc_samples, rng);
    out.probabilities[i] = p;
    out.classes[i] = class_from_probability(p, threshold);
    out.draws[i] = sample.mis_continuous.empty() ? 1 : mc_samples;
  });
  return out;
}

std::string predictions_csv(const PredictionOutput& out) {
  std::string csv = "id,p_hat,y_hat\n";
  char buf[64];
  for (std::size_t i = 0; i < out.probabilities.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", out.probabilities[i]);
    csv += std::to_string(i) + "," + buf + "," + std::to_string(out.classes[i]) + "\n";
  }
  return csv;
}

}  // namespace mixsaem
