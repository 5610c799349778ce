#pragma once

#include <Eigen/Dense>

namespace mixsaem {

/// Weighted logistic log-likelihood over a design that already contains the
/// intercept column:
///
///   F(beta) = sum_r w_r [y_r eta_r - log(1 + exp(eta_r))] - ridge/2 |P beta|^2
///
/// where P drops the intercept unless `penalize_intercept` is set.
struct WeightedLogisticProblem {
  Eigen::MatrixXd design;
  Eigen::VectorXd y;
  Eigen::VectorXd weights;
  double ridge = 0.0;
  bool penalize_intercept = false;

  Eigen::Index rows() const { return design.rows(); }
  Eigen::Index dim() const { return design.cols(); }
};

double weighted_logistic_objective(const WeightedLogisticProblem& problem,
                                   const Eigen::VectorXd& beta);
Eigen::VectorXd weighted_logistic_gradient(const WeightedLogisticProblem& problem,
                                           const Eigen::VectorXd& beta);

struct NewtonOptions {
  int max_iterations = 50;
  double gradient_tolerance = 1e-6;
};

struct NewtonResult {
  Eigen::VectorXd beta;
  int iterations = 0;
  double gradient_norm = 0.0;  // infinity norm at exit
  double objective = 0.0;
  bool converged = false;
};

/// Damped Newton ascent with step halving. Stops once the gradient
/// infinity norm drops below the tolerance or the iteration budget runs out.
NewtonResult maximize_weighted_logistic(const WeightedLogisticProblem& problem,
                                        const Eigen::VectorXd& start,
                                        const NewtonOptions& options);

}  // namespace mixsaem
