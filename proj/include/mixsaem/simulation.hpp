#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "mixsaem/data_model.hpp"
#include "mixsaem/missingness.hpp"
#include "mixsaem/model.hpp"

namespace mixsaem {

/// Generator for the hybrid synthetic study: independent categorical
/// covariates, jointly Gaussian continuous covariates, logistic outcome.
struct SyntheticDesign {
  std::size_t n = 1000;
  std::vector<Eigen::VectorXd> discrete_probs;
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::VectorXd beta;  // level-code encoding, intercept first

  /// One binary (p = 0.5) and one five-level covariate, five Gaussian
  /// covariates, beta = [0, -0.9, 0.01, 0.1, -0.6, 0.3, 0.01, 0.8].
  static SyntheticDesign reference();

  Schema schema() const;
  ModelParams truth() const;
};

/// Fully observed draw. Each row uses its own stream derived from
/// (seed, row), so a prefix of a larger draw equals a smaller draw.
HybridDataset simulate(const SyntheticDesign& design, std::uint64_t seed);

/// Default MCAR plan for the reference design: every covariate targeted.
MissingnessSpec reference_mcar(double rate, std::uint64_t seed);
/// Default MAR plan: x1, x2, x4, x6 masked through x3, x5, x7.
MissingnessSpec reference_mar(double rate, std::uint64_t seed);

}  // namespace mixsaem
