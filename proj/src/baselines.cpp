#include "mixsaem/baselines.hpp"

#include <cmath>
#include <limits>

#include "mixsaem/logistic.hpp"
#include "mixsaem/saem.hpp"

namespace mixsaem {

Eigen::VectorXd fit_logistic(const Eigen::MatrixXd& X, const Eigen::VectorXi& y,
                             const LogisticFitOptions& options) {
  const auto n = X.rows();
  if (y.size() != n) throw DataError("fit_logistic: X and y differ in length");
  if (n == 0) throw DataError("fit_logistic: no rows");
  if (options.ridge < 0.0) throw DataError("fit_logistic: ridge must be >= 0");
  const auto positives = y.sum();
  if (options.ridge == 0.0) {
    if (n <= X.cols() + 1)
      throw DataError("fit_logistic: need more rows than coefficients");
    if (positives == 0 || positives == n)
      throw ConvergenceError("fit_logistic: single outcome class; the MLE does not exist");
  }

  WeightedLogisticProblem problem;
  problem.design.resize(n, X.cols() + 1);
  problem.design.col(0).setOnes();
  problem.design.rightCols(X.cols()) = X;
  problem.y = y.cast<double>();
  problem.weights = Eigen::VectorXd::Ones(n);
  problem.ridge = options.ridge;
  problem.penalize_intercept = false;

  const auto result = maximize_weighted_logistic(
      problem, Eigen::VectorXd::Zero(problem.dim()),
      NewtonOptions{options.max_iterations, options.gradient_tolerance});
  if (!result.converged)
    throw ConvergenceError("fit_logistic: Newton did not converge (gradient norm " +
                           std::to_string(result.gradient_norm) + "); data may be separable");
  if (options.ridge == 0.0) {
    const double loglik = weighted_logistic_objective(problem, result.beta);
    if (loglik > -1e-6)
      throw ConvergenceError("fit_logistic: perfectly separated data; the MLE does not exist");
  }
  return result.beta;
}

Eigen::MatrixXd covariate_matrix(const HybridDataset& ds, DiscreteEncoding encoding) {
  if (!ds.fully_observed()) throw DataError("covariate_matrix: dataset has missing cells");
  const auto levels = ds.schema().discrete_levels();
  const auto h = ds.num_continuous();
  const auto p = design_size(encoding, levels, h);
  ModelParams shape;
  shape.encoding = encoding;
  shape.beta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
  for (const int m : levels)
    shape.discretes.push_back(CategoricalParams{Eigen::VectorXd::Constant(m, 1.0 / m)});
  shape.gaussian.mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(h));
  Eigen::MatrixXd X(static_cast<Eigen::Index>(ds.rows()), static_cast<Eigen::Index>(p - 1));
  for (std::size_t i = 0; i < ds.rows(); ++i) {
    const auto s = sample_view(ds, i);
    const Eigen::VectorXd row = shape.design_row(s.discrete, s.continuous);
    X.row(static_cast<Eigen::Index>(i)) = row.tail(row.size() - 1).transpose();
  }
  return X;
}

Eigen::VectorXi outcome_vector(const HybridDataset& ds) {
  Eigen::VectorXi y(static_cast<Eigen::Index>(ds.rows()));
  for (std::size_t i = 0; i < ds.rows(); ++i) y(static_cast<Eigen::Index>(i)) = ds.outcomes()[i];
  return y;
}

HybridDataset impute_mean_mode(const HybridDataset& ds) {
  const auto& schema = ds.schema();
  Eigen::MatrixXd values = ds.values();
  for (std::size_t j = 0; j < schema.size(); ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    double fill = 0.0;
    if (schema.columns[j].is_discrete()) {
      std::vector<std::size_t> counts(static_cast<std::size_t>(schema.columns[j].levels) + 1, 0);
      std::size_t seen = 0;
      for (std::size_t i = 0; i < ds.rows(); ++i)
        if (ds.observed(i, j)) {
          ++counts[static_cast<std::size_t>(values(static_cast<Eigen::Index>(i), col))];
          ++seen;
        }
      if (seen == 0)
        throw DataError("impute_mean_mode: column '" + schema.columns[j].name + "' is fully missing");
      std::size_t best = 1;
      for (std::size_t m = 2; m < counts.size(); ++m)
        if (counts[m] > counts[best]) best = m;
      fill = static_cast<double>(best);
    } else {
      double sum = 0.0;
      std::size_t seen = 0;
      for (std::size_t i = 0; i < ds.rows(); ++i)
        if (ds.observed(i, j)) {
          sum += values(static_cast<Eigen::Index>(i), col);
          ++seen;
        }
      if (seen == 0)
        throw DataError("impute_mean_mode: column '" + schema.columns[j].name + "' is fully missing");
      fill = sum / static_cast<double>(seen);
    }
    for (std::size_t i = 0; i < ds.rows(); ++i)
      if (!ds.observed(i, j)) values(static_cast<Eigen::Index>(i), col) = fill;
  }
  BoolMatrix mask = BoolMatrix::Constant(ds.mask().rows(), ds.mask().cols(), true);
  return HybridDataset(schema, ds.outcomes(), std::move(values), std::move(mask));
}

HybridDataset complete_cases(const HybridDataset& ds) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < ds.rows(); ++i)
    if (ds.row_complete(i)) keep.push_back(i);
  return ds.subset(keep);
}

HybridDataset external_imputation_ingest(const std::string& path, const Schema& schema,
                                         const CsvOptions& options) {
  auto ds = load_csv(path, schema, options);
  for (std::size_t i = 0; i < ds.rows(); ++i)
    for (std::size_t j = 0; j < schema.size(); ++j)
      if (!ds.observed(i, j))
        throw DataError("external imputation: residual missing value at row " + std::to_string(i + 1) +
                        ", column '" + schema.columns[j].name + "'");
  return ds;
}

ModelParams baseline_params(const HybridDataset& train, const Eigen::VectorXd& beta,
                            DiscreteEncoding encoding) {
  ModelParams p = initial_params(train, encoding);
  if (beta.size() != p.beta.size()) throw DataError("baseline_params: beta has wrong length");
  p.beta = beta;
  return p;
}

}  // namespace mixsaem
