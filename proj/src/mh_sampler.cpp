#include "mixsaem/mh_sampler.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace mixsaem {

SampleTarget::SampleTarget(const SampleView& sample, const ModelParams& params)
    : y_(sample.y), combos_(build_combo_table(sample, params)) {
  eta_observed_ = params.beta(0);
  for (const auto j : sample.obs_discrete)
    eta_observed_ += params.discrete_term(j, sample.discrete[j]);
  const Eigen::VectorXd beta_c = params.continuous_beta();
  Eigen::VectorXd obs_vals(static_cast<Eigen::Index>(sample.obs_continuous.size()));
  for (std::size_t a = 0; a < sample.obs_continuous.size(); ++a) {
    const auto k = static_cast<Eigen::Index>(sample.obs_continuous[a]);
    obs_vals(static_cast<Eigen::Index>(a)) = sample.continuous(k);
    eta_observed_ += beta_c(k) * sample.continuous(k);
  }
  missing_beta_.resize(static_cast<Eigen::Index>(sample.mis_continuous.size()));
  for (std::size_t a = 0; a < sample.mis_continuous.size(); ++a)
    missing_beta_(static_cast<Eigen::Index>(a)) =
        beta_c(static_cast<Eigen::Index>(sample.mis_continuous[a]));
  proposal_ = gaussian_conditional(params.gaussian, sample.obs_continuous, obs_vals,
                                   sample.mis_continuous);
}

double SampleTarget::outcome_loglik(const Eigen::VectorXd& x_mis) const {
  if (x_mis.size() != missing_beta_.size())
    throw DataError("SampleTarget: imputation has wrong length");
  const double eta = eta_observed_ + missing_beta_.dot(x_mis);
  const auto n = combos_.size();
  if (n == 1) return bernoulli_logit_loglik(y_, eta + combos_.eta_offset[0]) + combos_.log_prior[0];
  std::vector<double> terms(n);
  for (std::size_t k = 0; k < n; ++k)
    terms[k] = bernoulli_logit_loglik(y_, eta + combos_.eta_offset[k]) + combos_.log_prior[k];
  return log_sum_exp(terms);
}

double SampleTarget::log_target(const Eigen::VectorXd& x_mis) const {
  return outcome_loglik(x_mis) + proposal_.logpdf(x_mis);
}

double target_unnormalized_logdensity(const Eigen::VectorXd& x_mis, const SampleView& sample,
                                      const ModelParams& params) {
  return SampleTarget(sample, params).log_target(x_mis);
}

double independence_log_ratio(double log_f_new, double log_g_new, double log_f_old,
                              double log_g_old) {
  return (log_f_new + log_g_old) - (log_f_old + log_g_new);
}

double snap_log_ratio(double log_ratio, double log_f_new, double log_g_new, double log_f_old,
                      double log_g_old) {
  const double scale = std::abs(log_f_new) + std::abs(log_g_new) + std::abs(log_f_old) +
                       std::abs(log_g_old);
  const double bound = 16.0 * std::numeric_limits<double>::epsilon() * scale;
  return std::abs(log_ratio) <= bound ? 0.0 : log_ratio;
}

bool mh_accept(double log_ratio, double u) {
  if (log_ratio >= 0.0) return u < 1.0 || u < std::exp(log_ratio);
  return std::log(u) < log_ratio;
}

MhResult mh_sample(const SampleTarget& target, const MhConfig& cfg, Rng& rng,
                   const std::function<double()>& uniform) {
  if (cfg.chain_length < 1) throw DataError("mh_sample: chain length must be >= 1");
  if (target.missing_dim() == 0)
    throw DataError("mh_sample: sample has no missing continuous coordinates");
  MhResult out;
  const auto& g = target.proposal();
  Eigen::VectorXd current = g.sample(rng);
  double log_f = target.log_target(current);
  double log_g = g.logpdf(current);
  for (int s = 0; s < cfg.chain_length; ++s) {
    Eigen::VectorXd proposal = g.sample(rng);
    const double u = uniform();
    const double log_f_new = target.log_target(proposal);
    const double log_g_new = g.logpdf(proposal);
    ++out.diagnostics.proposed;
    const double log_r = snap_log_ratio(independence_log_ratio(log_f_new, log_g_new, log_f, log_g),
                                        log_f_new, log_g_new, log_f, log_g);
    if (mh_accept(log_r, u)) {
      current = std::move(proposal);
      log_f = log_f_new;
      log_g = log_g_new;
      ++out.diagnostics.accepted;
    }
  }
  out.x_mis = std::move(current);
  return out;
}

MhResult mh_sample(const SampleTarget& target, const MhConfig& cfg, Rng& rng) {
  return mh_sample(target, cfg, rng, [&rng] { return uniform01(rng); });
}

MhResult mh_sample(const SampleView& sample, const ModelParams& params, const MhConfig& cfg,
                   Rng& rng) {
  return mh_sample(SampleTarget(sample, params), cfg, rng);
}

}  // namespace mixsaem
