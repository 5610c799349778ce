#pragma once

#include <Eigen/Dense>
#include <string>

#include "mixsaem/data_model.hpp"
#include "mixsaem/model.hpp"

namespace mixsaem {

struct LogisticFitOptions {
  double ridge = 0.0;  // on non-intercept coefficients only
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;
};

/// Plain logistic MLE by damped Newton. `X` excludes the intercept; the
/// returned coefficients are [intercept, X columns...]. Throws
/// ConvergenceError when the data are (quasi-)separable and ridge == 0, or
/// when Newton fails to reach the gradient tolerance.
Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                             const LogisticFitOptions& options = {});

/// Covariate design without the intercept column; requires a fully
/// observed dataset.
Eigen::MatrixXd covariate_matrix(const HybridDataset& ds, DiscreteEncoding encoding);
Eigen::VectorXi outcome_vector(const HybridDataset& ds);

/// Continuous gaps take the observed column mean, discrete gaps the
/// observed mode (ties to the smallest level).
HybridDataset impute_mean_mode(const HybridDataset& ds);

/// Rows with no missing covariate, order preserved. May be empty, in which
/// case the result has zero rows.
HybridDataset complete_cases(const HybridDataset& ds);

/// Loads a dataset completed by an external imputer; any remaining NA is an
/// error naming the cell.
HybridDataset external_imputation_ingest(const std::string& path, const Schema& schema,
                                         const CsvOptions& options = {});

/// ModelParams wrapper for a baseline fit: beta from the regression, the
/// covariate distribution from moments and frequencies of `train`.
ModelParams baseline_params(const HybridDataset& train, const Eigen::VectorXd& beta,
                            DiscreteEncoding encoding);

}  // namespace mixsaem
