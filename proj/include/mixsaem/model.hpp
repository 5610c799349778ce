#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mixsaem/data_model.hpp"
#include "mixsaem/distributions.hpp"

namespace mixsaem {

/// How discrete covariates enter the linear predictor. LevelCode multiplies
/// one coefficient by the level code 1..M_j; OneHot uses M_j - 1 indicator
/// columns with level 1 as reference.
enum class DiscreteEncoding { LevelCode, OneHot };

/// Largest missing-discrete product space enumerated exactly per sample.
inline constexpr std::size_t kMaxDiscreteCombos = 4096;

/// Number of regression coefficients, intercept included.
std::size_t design_size(DiscreteEncoding encoding, const std::vector<int>& levels,
                        std::size_t num_continuous);

/// theta = {beta, (mu, Sigma), theta^d_1..l}.
struct ModelParams {
  Eigen::VectorXd beta;
  GaussianParams gaussian;
  std::vector<CategoricalParams> discretes;
  DiscreteEncoding encoding = DiscreteEncoding::LevelCode;

  std::size_t num_discrete() const { return discretes.size(); }
  std::size_t num_continuous() const { return static_cast<std::size_t>(gaussian.dim()); }
  std::vector<int> levels() const;

  /// Throws on inconsistent dimensions, non-SPD covariance or off-simplex
  /// probabilities.
  void validate() const;

  /// Contribution of discrete variable j at `level` to the linear predictor.
  double discrete_term(std::size_t j, int level) const;
  /// beta^T [1, x^d, x^c].
  double linear_predictor(const std::vector<int>& discrete, const Eigen::VectorXd& continuous) const;
  /// [1, encoded x^d, x^c].
  Eigen::VectorXd design_row(const std::vector<int>& discrete,
                             const Eigen::VectorXd& continuous) const;
  /// Coefficients on the continuous block.
  Eigen::VectorXd continuous_beta() const;
};

/// Enumeration of a sample's missing discrete coordinates. Combination k is
/// decoded in mixed radix with the first missing coordinate varying fastest.
struct ComboTable {
  std::vector<std::size_t> coords;   // missing discrete indices
  std::vector<int> radix;            // M_j for each missing coordinate
  std::vector<double> eta_offset;    // sum of discrete_term over the combo
  std::vector<double> log_prior;     // sum of log theta^d_j over the combo

  std::size_t size() const { return eta_offset.size(); }
  /// Level codes (1-based) of combination k, aligned with coords.
  std::vector<int> decode(std::size_t k) const;
};

/// Throws EnumerationCapError when the product space exceeds the cap.
std::size_t combo_count(const SampleView& sample, const std::vector<int>& levels,
                        std::size_t cap = kMaxDiscreteCombos);
ComboTable build_combo_table(const SampleView& sample, const ModelParams& params);

/// Sample's discrete levels with combination k filled in.
std::vector<int> completed_discrete(const SampleView& sample, const ComboTable& table,
                                    std::size_t k);

/// Sample's continuous vector with the missing block replaced by x_mis.
Eigen::VectorXd completed_continuous(const SampleView& sample, const Eigen::VectorXd& x_mis);

}  // namespace mixsaem
