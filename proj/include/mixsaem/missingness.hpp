#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "mixsaem/data_model.hpp"

namespace mixsaem {

enum class Mechanism { MCAR, MAR };

/// Missingness injection plan. Columns are covariate indices into the
/// schema. For MAR, `driver_coefficients[k]` weights the standardized
/// drivers for target k; an empty list means weight 1 on every driver.
struct MissingnessSpec {
  Mechanism mechanism = Mechanism::MCAR;
  double rate = 0.3;
  std::vector<std::size_t> target_columns;
  std::vector<std::size_t> driver_columns;
  std::vector<Eigen::VectorXd> driver_coefficients;
  std::uint64_t seed = 0;
};

/// Masks each target cell independently with probability `rate`.
HybridDataset inject_mcar(const HybridDataset& ds, const MissingnessSpec& spec);

/// Masks target k in row i with probability sigmoid(alpha_k + gamma_k^T z_i),
/// z the standardized drivers, alpha_k bisected so the mean probability hits
/// `rate`.
HybridDataset inject_mar(const HybridDataset& ds, const MissingnessSpec& spec);

HybridDataset inject(const HybridDataset& ds, const MissingnessSpec& spec);

/// Intercept alpha with mean(sigmoid(alpha + offsets)) == rate, by 60
/// bisection steps on [-30, 30]. Throws DataError if the rate is not
/// bracketed or the final mean misses by more than 0.005.
double calibrate_intercept(const Eigen::VectorXd& offsets, double rate);

Mechanism parse_mechanism(const std::string& name);
std::string mechanism_name(Mechanism m);

}  // namespace mixsaem
