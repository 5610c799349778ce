#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>

#include "mixsaem/model.hpp"

namespace mixsaem {

struct MhConfig {
  int chain_length = 20;
  std::uint64_t seed = 0;
};

struct MhDiagnostics {
  std::size_t accepted = 0;
  std::size_t proposed = 0;

  double acceptance_rate() const {
    return proposed == 0 ? 1.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
  MhDiagnostics& operator+=(const MhDiagnostics& other) {
    accepted += other.accepted;
    proposed += other.proposed;
    return *this;
  }
};

/// Posterior of one sample's missing continuous block given y, x_obs and the
/// current parameters, up to a constant:
///
///   f(x) = sum_{combos} p(y | combo, x, x_obs; beta) p(combo; theta^d) g(x)
///
/// where g is the conditional Gaussian p(x | x^c_obs; mu, Sigma). Everything
/// that does not depend on x is precomputed once.
class SampleTarget {
 public:
  SampleTarget(const SampleView& sample, const ModelParams& params);

  const ConditionalGaussian& proposal() const { return proposal_; }
  const ComboTable& combos() const { return combos_; }
  std::size_t missing_dim() const { return missing_beta_.size(); }

  /// log sum_{combos} p(y | combo, x) p(combo): the discrete-marginalized
  /// outcome likelihood.
  double outcome_loglik(const Eigen::VectorXd& x_mis) const;
  double proposal_logpdf(const Eigen::VectorXd& x_mis) const { return proposal_.logpdf(x_mis); }
  /// log f(x_mis).
  double log_target(const Eigen::VectorXd& x_mis) const;

 private:
  int y_;
  double eta_observed_;  // beta0 + observed discrete + observed continuous terms
  Eigen::VectorXd missing_beta_;
  ConditionalGaussian proposal_;
  ComboTable combos_;
};

double target_unnormalized_logdensity(const Eigen::VectorXd& x_mis, const SampleView& sample,
                                      const ModelParams& params);

/// log r for an independence proposal:
///   log f(new) + log g(old) - log f(old) - log g(new).
double independence_log_ratio(double log_f_new, double log_g_new, double log_f_old,
                              double log_g_old);

/// log r with rounding noise removed: a ratio within a few ulps of the
/// operands' magnitude is indistinguishable from 1 and is returned as 0.
double snap_log_ratio(double log_ratio, double log_f_new, double log_g_new, double log_f_old,
                      double log_g_old);

/// Accept iff u < r, evaluated as log(u) < log(r).
bool mh_accept(double log_ratio, double u);

struct MhResult {
  Eigen::VectorXd x_mis;
  MhDiagnostics diagnostics;
};

/// Independence Metropolis-Hastings chain with proposal g: initialize from
/// g, then run `chain_length` propose/accept steps and return the final
/// state. `uniform` supplies the acceptance draw u for each step.
MhResult mh_sample(const SampleTarget& target, const MhConfig& cfg, Rng& rng,
                   const std::function<double()>& uniform);
MhResult mh_sample(const SampleTarget& target, const MhConfig& cfg, Rng& rng);
MhResult mh_sample(const SampleView& sample, const ModelParams& params, const MhConfig& cfg,
                   Rng& rng);

}  // namespace mixsaem
