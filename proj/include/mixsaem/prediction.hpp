#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mixsaem/data_model.hpp"
#include "mixsaem/model.hpp"

namespace mixsaem {

/// Unnormalized class scores of the Monte-Carlo prediction rule:
///   score(c) = sum_combos p(combo; theta^d) sum_s p(y = c | x^(s), combo, x_obs; beta)
/// with S draws x^(s) from p(x^c_mis | x^c_obs). `draws` is S, or 1 when no
/// continuous coordinate is missing (the inner sum is then exact).
struct ClassScores {
  double score0 = 0.0;
  double score1 = 0.0;
  int draws = 0;
};

ClassScores predict_scores(const SampleView& sample, const ModelParams& params, int mc_samples,
                           Rng& rng);

/// p(y = 1 | x_obs; theta), i.e. the class-1 score divided by S.
double predict_proba(const SampleView& sample, const ModelParams& params, int mc_samples,
                     Rng& rng);

/// 1 iff p >= threshold; a tie at the threshold goes to class 1.
int class_from_probability(double p, double threshold = 0.5);

int predict_class(const SampleView& sample, const ModelParams& params, int mc_samples, Rng& rng,
                  double threshold = 0.5);

struct PredictionOutput {
  std::vector<double> probabilities;
  std::vector<int> classes;
  std::vector<int> draws;
};

/// Batch prediction; sample i uses the stream derive_seed(seed, {i}).
PredictionOutput predict_dataset(const HybridDataset& ds, const ModelParams& params,
                                 int mc_samples, std::uint64_t seed, double threshold = 0.5,
                                 unsigned threads = 1);

/// id,p_hat,y_hat
std::string predictions_csv(const PredictionOutput& out);

}  // namespace mixsaem
