#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mixsaem/data_model.hpp"
#include "mixsaem/logistic.hpp"
#include "mixsaem/mh_sampler.hpp"
#include "mixsaem/model.hpp"

namespace mixsaem {

// ---------------------------------------------------------------------------
// Likelihood pieces

/// y eta - log(1 + exp(eta)) with eta = beta^T [1, x].
double logistic_loglik_term(const ModelParams& params, int y, const std::vector<int>& discrete,
                            const Eigen::VectorXd& continuous);
/// sum_j log theta^d_j(x^j).
double discrete_loglik_term(const ModelParams& params, const std::vector<int>& discrete);
/// log N(x^c; mu, Sigma); 0 when there are no continuous covariates.
double continuous_loglik_term(const ModelParams& params, const Eigen::VectorXd& continuous);

/// log p(y, x; theta) for a fully specified covariate vector.
double complete_loglik(const ModelParams& params, int y, const std::vector<int>& discrete,
                       const Eigen::VectorXd& continuous);

/// Monte-Carlo estimate of sum_i log p(y_i, x_i,obs; theta). Missing
/// discretes are summed out exactly; missing continuous coordinates are
/// averaged over n_mc draws from their conditional Gaussian.
double observed_loglik_estimate(const ModelParams& params, const HybridDataset& ds, int n_mc,
                                std::uint64_t seed);
/// Per-sample term of the estimate above.
double observed_loglik_sample(const ModelParams& params, const SampleView& sample, int n_mc,
                              Rng& rng);

// ---------------------------------------------------------------------------
// S-step / SA-step pieces

/// Normalized weights over the product space of a sample's missing discrete
/// levels, in the mixed-radix order of ComboTable. Samples without missing
/// discretes carry a single weight of 1.
struct DiscretePosterior {
  std::vector<std::size_t> coords;
  std::vector<int> radix;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  /// Marginal of the table onto missing coordinate `coords[a]`.
  Eigen::VectorXd marginal(std::size_t a) const;
};

/// w~_i(combo) proportional to p(y | combo, x^d_obs, x^c; beta) p(combo; theta^d).
/// `continuous` is the sample's full (observed + imputed) continuous vector.
DiscretePosterior discrete_posterior(const SampleView& sample, const Eigen::VectorXd& continuous,
                                     const ModelParams& params);

struct SufficientStats {
  Eigen::VectorXd t1;  // (1/n) sum x^c_i
  Eigen::MatrixXd t2;  // sum x^c_i x^c_i^T
};

/// Fresh statistics from an n x h matrix of completed continuous rows.
SufficientStats sufficient_stats(const Eigen::MatrixXd& completed);
/// T <- T + delta (T~ - T); an empty `prev` is initialized to T~.
SufficientStats sa_update_stats(const std::optional<SufficientStats>& prev,
                                const Eigen::MatrixXd& completed, double delta);

/// Elementwise w <- w + delta (w~ - w). Throws DataError on support mismatch.
std::vector<DiscretePosterior> sa_update_weights(const std::vector<DiscretePosterior>& prev,
                                                 const std::vector<DiscretePosterior>& fresh,
                                                 double delta);

// ---------------------------------------------------------------------------
// M-step pieces

struct BetaOptimizerConfig {
  int max_iterations = 50;
  double gradient_tolerance = 1e-6;
  double ridge = 1e-8;  // applied to every coefficient, intercept included
};

/// One block of the beta objective: completed continuous rows paired with
/// the discrete weight tables used for them, scaled by `coefficient`.
struct BetaObjectiveBlock {
  const Eigen::MatrixXd* completed = nullptr;
  const std::vector<DiscretePosterior>* weights = nullptr;
  double coefficient = 1.0;
};

/// Expanded design of the weighted objective: every sample is replicated
/// once per discrete combination with case weight coefficient * w_i(combo).
WeightedLogisticProblem expanded_beta_problem(const std::vector<SampleView>& samples,
                                              std::span<const BetaObjectiveBlock> blocks,
                                              const ModelParams& params, double ridge);

Eigen::VectorXd mstep_beta(const std::vector<SampleView>& samples,
                           const Eigen::MatrixXd& completed,
                           const std::vector<DiscretePosterior>& weights,
                           const ModelParams& params, const Eigen::VectorXd& warm_start,
                           const BetaOptimizerConfig& cfg);

/// mu = T1, Sigma = T2 / n - T1 T1^T, SPD-repaired.
GaussianParams mstep_gaussian(const SufficientStats& stats, std::size_t n);

/// theta_j(m) = (#{observed x^j = m} + sum_{i missing j} w^j_i(m)) / n.
std::vector<CategoricalParams> mstep_discrete(const std::vector<SampleView>& samples,
                                              const std::vector<DiscretePosterior>& weights,
                                              const std::vector<int>& levels);

// ---------------------------------------------------------------------------
// Driver

enum class StepRule {
  Shifted,  // 1 for t <= burn_in, (t - burn_in)^-tau afterwards
  Literal,  // 1 for t <= burn_in, (t + burn_in)^-tau afterwards
};

enum class BetaObjective {
  SmoothedWeights,  // smoothed w_i^(t) with the current imputations
  Replay,           // SA-weighted replay of the last `replay_window` S-steps
};

struct SaemConfig {
  int iterations = 500;
  int burn_in = 50;
  double tau = 1.0;
  StepRule step_rule = StepRule::Shifted;
  MhConfig mh;
  BetaOptimizerConfig beta_optimizer;
  BetaObjective beta_objective = BetaObjective::Replay;
  int replay_window = 5;
  DiscreteEncoding encoding = DiscreteEncoding::LevelCode;
  std::uint64_t seed = 0;
  int prediction_samples = 200;
  int trajectory_loglik_samples = 10;  // 0 disables the per-iteration estimate
  bool keep_param_history = true;
  unsigned threads = 1;
};

double step_size(int t, const SaemConfig& cfg);

struct IterationRecord {
  int iteration = 0;
  double delta = 0.0;
  Eigen::VectorXd beta;
  double loglik = 0.0;  // NaN when disabled
  double acceptance_rate = 1.0;
};

struct FitResult {
  ModelParams params;
  std::vector<IterationRecord> trajectory;
  std::vector<ModelParams> param_history;
  MhDiagnostics mh_total;
  int iterations = 0;
};

/// theta^(0): beta = 0, available-case moments for (mu, Sigma), add-one
/// smoothed observed frequencies for theta^d.
ModelParams initial_params(const HybridDataset& ds, DiscreteEncoding encoding);

FitResult fit_saem(const HybridDataset& train, const SaemConfig& cfg);

/// iteration,delta,beta_0..beta_p,loglik,acceptance_rate
std::string trajectory_csv(const FitResult& fit);

}  // namespace mixsaem
