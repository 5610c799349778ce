#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mixsaem/common.hpp"

namespace mixsaem {

/// Stand-in for log(0): finite so that log-sum-exp arithmetic never sees
/// -inf - -inf, yet exp() of it underflows to exactly 0.
inline constexpr double kLogZero = -1e300;
inline bool is_log_zero(double v) { return v <= kLogZero * 0.5; }

/// log(1 + exp(x)) without overflow.
double softplus(double x);
/// log p(y | eta) for the logistic link: y*eta - softplus(eta).
double bernoulli_logit_loglik(int y, double eta);
/// 1 / (1 + exp(-eta)), stable in both tails.
double sigmoid(double eta);
double log_sum_exp(std::span<const double> values);

/// p(y = 1 | x) with the intercept prepended: beta = [b0, b_1..b_p].
double sigmoid_logodds(const Eigen::VectorXd& beta, const Eigen::VectorXd& x);

struct GaussianParams {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;

  Eigen::Index dim() const { return mean.size(); }
};

/// Symmetrizes `cov` and, if its Cholesky factorization fails, adds a ridge
/// of 1e-8 * trace / h once. Throws NotSpdError if that still fails.
Eigen::MatrixXd repair_covariance(const Eigen::MatrixXd& cov, bool* repaired = nullptr);

/// Lower Cholesky factor of an SPD matrix; throws NotSpdError otherwise.
Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& cov);

double gaussian_logpdf(const GaussianParams& g, const Eigen::VectorXd& x);

/// Gaussian over the missing block given the observed block. Carries its
/// own Cholesky factor so repeated logpdf/sample calls stay cheap.
struct ConditionalGaussian {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  std::vector<std::size_t> mis;
  std::vector<std::size_t> obs;
  Eigen::MatrixXd chol;  // lower factor of cov
  double log_det = 0.0;

  Eigen::Index dim() const { return mean.size(); }
  double logpdf(const Eigen::VectorXd& x) const;
  Eigen::VectorXd sample(Rng& rng) const;
};

ConditionalGaussian gaussian_conditional(const GaussianParams& g,
                                         const std::vector<std::size_t>& obs_idx,
                                         const Eigen::VectorXd& obs_vals,
                                         const std::vector<std::size_t>& mis_idx);

/// Log-density of the marginal over `idx`, evaluated at `vals`.
double gaussian_marginal_logpdf(const GaussianParams& g, const std::vector<std::size_t>& idx,
                                const Eigen::VectorXd& vals);

Eigen::VectorXd standard_normal_vector(Eigen::Index dim, Rng& rng);
Eigen::VectorXd gaussian_sample(const GaussianParams& g, Rng& rng);

struct CategoricalParams {
  Eigen::VectorXd probs;  // probs(m-1) = P(level m)

  int levels() const { return static_cast<int>(probs.size()); }
};

/// Throws DataError unless probs are nonnegative and sum to 1 within tol.
void validate_simplex(const CategoricalParams& c, double tol = 1e-12);

/// log P(level); kLogZero when the probability is exactly 0.
double categorical_logpmf(const CategoricalParams& c, int level);
/// Inverse-CDF draw on one uniform; returns a level in 1..M.
int categorical_sample(const CategoricalParams& c, Rng& rng);

}  // namespace mixsaem
