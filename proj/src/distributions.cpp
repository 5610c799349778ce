#include "mixsaem/distributions.hpp"

#include <algorithm>
#include <cmath>

namespace mixsaem {

namespace {

constexpr double kLog2Pi = 1.8378770664093454836;

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

bool try_cholesky(const Eigen::MatrixXd& m, Eigen::MatrixXd& lower) {
  if (!m.allFinite()) return false;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  lower = llt.matrixL();
  return lower.diagonal().minCoeff() > 0.0;
}

Eigen::MatrixXd pick(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                     const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols.size()));
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = 0; b < cols.size(); ++b)
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
          m(static_cast<Eigen::Index>(rows[a]), static_cast<Eigen::Index>(cols[b]));
  return out;
}

Eigen::VectorXd pick(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t a = 0; a < idx.size(); ++a)
    out(static_cast<Eigen::Index>(a)) = v(static_cast<Eigen::Index>(idx[a]));
  return out;
}

}  // namespace

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double bernoulli_logit_loglik(int y, double eta) {
  return y == 1 ? -softplus(-eta) : -softplus(eta);
}

double sigmoid(double eta) {
  if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) return kLogZero;
  const double m = *std::max_element(values.begin(), values.end());
  if (is_log_zero(m)) return kLogZero;
  double acc = 0.0;
  for (const double v : values) acc += std::exp(v - m);
  return m + std::log(acc);
}

double sigmoid_logodds(const Eigen::VectorXd& beta, const Eigen::VectorXd& x) {
  if (beta.size() != x.size() + 1)
    throw DataError("sigmoid_logodds: beta has " + std::to_string(beta.size()) +
                    " entries, expected " + std::to_string(x.size() + 1));
  return sigmoid(beta(0) + beta.tail(x.size()).dot(x));
}

Eigen::MatrixXd cholesky_lower(const Eigen::MatrixXd& cov) {
  Eigen::MatrixXd lower;
  if (cov.rows() != cov.cols() || !try_cholesky(cov, lower))
    throw NotSpdError("covariance matrix is not symmetric positive definite");
  return lower;
}

Eigen::MatrixXd repair_covariance(const Eigen::MatrixXd& cov, bool* repaired) {
  if (cov.rows() != cov.cols()) throw NotSpdError("covariance matrix is not square");
  if (repaired) *repaired = false;
  Eigen::MatrixXd sym = symmetrized(cov);
  Eigen::MatrixXd lower;
  if (try_cholesky(sym, lower)) return sym;
  const double ridge = 1e-8 * sym.trace() / static_cast<double>(sym.rows());
  if (ridge > 0.0) sym.diagonal().array() += ridge;
  if (!try_cholesky(sym, lower))
    throw NotSpdError("covariance matrix is not SPD even after ridge repair");
  if (repaired) *repaired = true;
  return sym;
}

double gaussian_logpdf(const GaussianParams& g, const Eigen::VectorXd& x) {
  if (x.size() != g.dim() || g.cov.rows() != g.dim())
    throw DataError("gaussian_logpdf: dimension mismatch");
  const Eigen::MatrixXd lower = cholesky_lower(g.cov);
  const Eigen::VectorXd z = lower.triangularView<Eigen::Lower>().solve(x - g.mean);
  const double log_det = 2.0 * lower.diagonal().array().log().sum();
  return -0.5 * (static_cast<double>(g.dim()) * kLog2Pi + log_det + z.squaredNorm());
}

double ConditionalGaussian::logpdf(const Eigen::VectorXd& x) const {
  if (x.size() != dim()) throw DataError("ConditionalGaussian::logpdf: dimension mismatch");
  if (dim() == 0) return 0.0;
  const Eigen::VectorXd z = chol.triangularView<Eigen::Lower>().solve(x - mean);
  return -0.5 * (static_cast<double>(dim()) * kLog2Pi + log_det + z.squaredNorm());
}

Eigen::VectorXd ConditionalGaussian::sample(Rng& rng) const {
  return mean + chol * standard_normal_vector(dim(), rng);
}

ConditionalGaussian gaussian_conditional(const GaussianParams& g,
                                         const std::vector<std::size_t>& obs_idx,
                                         const Eigen::VectorXd& obs_vals,
                                         const std::vector<std::size_t>& mis_idx) {
  const auto h = static_cast<std::size_t>(g.dim());
  if (obs_idx.size() + mis_idx.size() != h ||
      static_cast<std::size_t>(obs_vals.size()) != obs_idx.size())
    throw DataError("gaussian_conditional: index sets do not partition the dimensions");
  std::vector<bool> seen(h, false);
  for (const auto* set : {&obs_idx, &mis_idx})
    for (const auto k : *set) {
      if (k >= h || seen[k])
        throw DataError("gaussian_conditional: index sets do not partition the dimensions");
      seen[k] = true;
    }

  ConditionalGaussian c;
  c.mis = mis_idx;
  c.obs = obs_idx;
  c.mean = pick(g.mean, mis_idx);
  c.cov = pick(g.cov, mis_idx, mis_idx);
  if (!obs_idx.empty() && !mis_idx.empty()) {
    const Eigen::MatrixXd s_oo = pick(g.cov, obs_idx, obs_idx);
    const Eigen::MatrixXd s_mo = pick(g.cov, mis_idx, obs_idx);
    Eigen::LLT<Eigen::MatrixXd> llt(s_oo);
    if (llt.info() != Eigen::Success)
      throw NotSpdError("gaussian_conditional: observed block is singular");
    const Eigen::VectorXd resid = obs_vals - pick(g.mean, obs_idx);
    c.mean += s_mo * llt.solve(resid);
    c.cov -= s_mo * llt.solve(s_mo.transpose());
    c.cov = symmetrized(c.cov);
  }
  if (c.dim() > 0) {
    c.chol = cholesky_lower(c.cov);
    c.log_det = 2.0 * c.chol.diagonal().array().log().sum();
  }
  return c;
}

double gaussian_marginal_logpdf(const GaussianParams& g, const std::vector<std::size_t>& idx,
                                const Eigen::VectorXd& vals) {
  if (idx.empty()) return 0.0;
  GaussianParams marginal{pick(g.mean, idx), pick(g.cov, idx, idx)};
  return gaussian_logpdf(marginal, vals);
}

Eigen::VectorXd standard_normal_vector(Eigen::Index dim, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd z(dim);
  for (Eigen::Index k = 0; k < dim; ++k) z(k) = normal(rng);
  return z;
}

Eigen::VectorXd gaussian_sample(const GaussianParams& g, Rng& rng) {
  const Eigen::MatrixXd lower = cholesky_lower(g.cov);
  return g.mean + lower * standard_normal_vector(g.dim(), rng);
}

void validate_simplex(const CategoricalParams& c, double tol) {
  if (c.levels() < 1) throw DataError("categorical: empty probability vector");
  if ((c.probs.array() < 0.0).any() || !c.probs.allFinite())
    throw DataError("categorical: negative or non-finite probability");
  if (std::abs(c.probs.sum() - 1.0) > tol)
    throw DataError("categorical: probabilities do not sum to 1");
}

double categorical_logpmf(const CategoricalParams& c, int level) {
  if (level < 1 || level > c.levels())
    throw DataError("categorical_logpmf: level " + std::to_string(level) + " outside 1.." +
                    std::to_string(c.levels()));
  const double p = c.probs(level - 1);
  return p > 0.0 ? std::log(p) : kLogZero;
}

int categorical_sample(const CategoricalParams& c, Rng& rng) {
  const double u = uniform01(rng);
  double cum = 0.0;
  int last_positive = 1;
  for (int m = 1; m <= c.levels(); ++m) {
    const double p = c.probs(m - 1);
    if (p <= 0.0) continue;
    last_positive = m;
    cum += p;
    if (u < cum) return m;
  }
  return last_positive;
}

}  // namespace mixsaem
