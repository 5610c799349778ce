#include "mixsaem/logistic.hpp"

#include <cmath>

#include "mixsaem/common.hpp"
#include "mixsaem/distributions.hpp"

namespace mixsaem {

namespace {

Eigen::VectorXd penalty_mask(const WeightedLogisticProblem& problem) {
  Eigen::VectorXd mask = Eigen::VectorXd::Ones(problem.dim());
  if (!problem.penalize_intercept && mask.size() > 0) mask(0) = 0.0;
  return mask;
}

void check_shapes(const WeightedLogisticProblem& problem, const Eigen::VectorXd& beta) {
  if (beta.size() != problem.dim() || problem.y.size() != problem.rows() ||
      problem.weights.size() != problem.rows())
    throw DataError("weighted logistic: dimension mismatch");
}

}  // namespace

double weighted_logistic_objective(const WeightedLogisticProblem& problem,
                                   const Eigen::VectorXd& beta) {
  check_shapes(problem, beta);
  const Eigen::VectorXd eta = problem.design * beta;
  double value = 0.0;
  for (Eigen::Index r = 0; r < eta.size(); ++r)
    value += problem.weights(r) * (problem.y(r) * eta(r) - softplus(eta(r)));
  const Eigen::VectorXd penalized = beta.cwiseProduct(penalty_mask(problem));
  return value - 0.5 * problem.ridge * penalized.squaredNorm();
}

Eigen::VectorXd weighted_logistic_gradient(const WeightedLogisticProblem& problem,
                                           const Eigen::VectorXd& beta) {
  check_shapes(problem, beta);
  const Eigen::VectorXd eta = problem.design * beta;
  Eigen::VectorXd resid(eta.size());
  for (Eigen::Index r = 0; r < eta.size(); ++r)
    resid(r) = problem.weights(r) * (problem.y(r) - sigmoid(eta(r)));
  return problem.design.transpose() * resid -
         problem.ridge * beta.cwiseProduct(penalty_mask(problem));
}

NewtonResult maximize_weighted_logistic(const WeightedLogisticProblem& problem,
                                        const Eigen::VectorXd& start,
                                        const NewtonOptions& options) {
  check_shapes(problem, start);
  const Eigen::VectorXd mask = penalty_mask(problem);
  NewtonResult out;
  out.beta = start;
  out.objective = weighted_logistic_objective(problem, out.beta);
  if (!std::isfinite(out.objective))
    throw ConvergenceError("weighted logistic: non-finite objective at start");

  for (;;) {
    const Eigen::VectorXd eta = problem.design * out.beta;
    Eigen::VectorXd resid(eta.size());
    Eigen::VectorXd curvature(eta.size());
    for (Eigen::Index r = 0; r < eta.size(); ++r) {
      const double p = sigmoid(eta(r));
      resid(r) = problem.weights(r) * (problem.y(r) - p);
      curvature(r) = problem.weights(r) * p * (1.0 - p);
    }
    const Eigen::VectorXd grad =
        problem.design.transpose() * resid - problem.ridge * out.beta.cwiseProduct(mask);
    out.gradient_norm = grad.lpNorm<Eigen::Infinity>();
    if (out.gradient_norm < options.gradient_tolerance) {
      out.converged = true;
      return out;
    }
    if (out.iterations >= options.max_iterations) return out;

    Eigen::MatrixXd hessian =
        problem.design.transpose() * curvature.asDiagonal() * problem.design;
    hessian.diagonal() += problem.ridge * mask;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hessian);
    Eigen::VectorXd step = ldlt.solve(grad);
    if (ldlt.info() != Eigen::Success || !step.allFinite()) {
      // Singular curvature: fall back to a scaled gradient step.
      step = grad / std::max(1.0, hessian.diagonal().maxCoeff());
    }

    double scale = 1.0;
    Eigen::VectorXd candidate = out.beta + step;
    double value = weighted_logistic_objective(problem, candidate);
    while (!(value >= out.objective - 1e-12 * std::abs(out.objective)) && scale > 1e-10) {
      scale *= 0.5;
      candidate = out.beta + scale * step;
      value = weighted_logistic_objective(problem, candidate);
    }
    ++out.iterations;
    if (!(value >= out.objective - 1e-12 * std::abs(out.objective))) {
      // No ascent along the Newton direction; the current point is as good
      // as this solver gets.
      return out;
    }
    if (!std::isfinite(value))
      throw ConvergenceError("weighted logistic: objective became non-finite");
    out.beta = std::move(candidate);
    out.objective = value;
  }
}

}  // namespace mixsaem
