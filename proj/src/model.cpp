#include "mixsaem/model.hpp"

#include <numeric>

namespace mixsaem {

std::size_t design_size(DiscreteEncoding encoding, const std::vector<int>& levels,
                        std::size_t num_continuous) {
  std::size_t p = 1 + num_continuous;
  for (const int m : levels)
    p += encoding == DiscreteEncoding::OneHot ? static_cast<std::size_t>(m - 1) : 1;
  return p;
}

std::vector<int> ModelParams::levels() const {
  std::vector<int> out;
  out.reserve(discretes.size());
  for (const auto& d : discretes) out.push_back(d.levels());
  return out;
}

void ModelParams::validate() const {
  const auto p = design_size(encoding, levels(), num_continuous());
  if (static_cast<std::size_t>(beta.size()) != p)
    throw DataError("model params: beta has " + std::to_string(beta.size()) +
                    " entries, expected " + std::to_string(p));
  if (gaussian.cov.rows() != gaussian.dim() || gaussian.cov.cols() != gaussian.dim())
    throw DataError("model params: covariance shape does not match mean");
  if (gaussian.dim() > 0) cholesky_lower(gaussian.cov);
  for (const auto& d : discretes) {
    if (d.levels() < 2) throw DataError("model params: discrete variable with < 2 levels");
    validate_simplex(d, 1e-9);
  }
  if (!beta.allFinite()) throw DataError("model params: non-finite beta");
}

double ModelParams::discrete_term(std::size_t j, int level) const {
  if (encoding == DiscreteEncoding::LevelCode)
    return beta(static_cast<Eigen::Index>(1 + j)) * level;
  if (level == 1) return 0.0;
  Eigen::Index offset = 1;
  for (std::size_t k = 0; k < j; ++k) offset += discretes[k].levels() - 1;
  return beta(offset + level - 2);
}

Eigen::VectorXd ModelParams::continuous_beta() const {
  return beta.tail(gaussian.dim());
}

double ModelParams::linear_predictor(const std::vector<int>& discrete,
                                     const Eigen::VectorXd& continuous) const {
  double eta = beta(0);
  for (std::size_t j = 0; j < discrete.size(); ++j) eta += discrete_term(j, discrete[j]);
  return eta + continuous_beta().dot(continuous);
}

Eigen::VectorXd ModelParams::design_row(const std::vector<int>& discrete,
                                        const Eigen::VectorXd& continuous) const {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(beta.size());
  row(0) = 1.0;
  Eigen::Index pos = 1;
  for (std::size_t j = 0; j < discrete.size(); ++j) {
    if (encoding == DiscreteEncoding::LevelCode) {
      row(pos++) = discrete[j];
    } else {
      if (discrete[j] > 1) row(pos + discrete[j] - 2) = 1.0;
      pos += discretes[j].levels() - 1;
    }
  }
  row.tail(continuous.size()) = continuous;
  return row;
}

std::vector<int> ComboTable::decode(std::size_t k) const {
  std::vector<int> out(radix.size());
  for (std::size_t a = 0; a < radix.size(); ++a) {
    const auto m = static_cast<std::size_t>(radix[a]);
    out[a] = static_cast<int>(k % m) + 1;
    k /= m;
  }
  return out;
}

std::size_t combo_count(const SampleView& sample, const std::vector<int>& levels,
                        std::size_t cap) {
  std::size_t count = 1;
  for (const auto j : sample.mis_discrete) {
    count *= static_cast<std::size_t>(levels.at(j));
    if (count > cap)
      throw EnumerationCapError(
          "sample " + std::to_string(sample.index) + ": missing discrete combinations exceed " +
          std::to_string(cap) + "; reduce the number or cardinality of discrete covariates");
  }
  return count;
}

ComboTable build_combo_table(const SampleView& sample, const ModelParams& params) {
  const auto levels = params.levels();
  const auto count = combo_count(sample, levels);
  ComboTable t;
  t.coords = sample.mis_discrete;
  for (const auto j : t.coords) t.radix.push_back(levels[j]);
  t.eta_offset.assign(count, 0.0);
  t.log_prior.assign(count, 0.0);
  std::vector<int> digits(t.coords.size(), 1);
  for (std::size_t k = 0; k < count; ++k) {
    double eta = 0.0;
    double lp = 0.0;
    for (std::size_t a = 0; a < t.coords.size(); ++a) {
      eta += params.discrete_term(t.coords[a], digits[a]);
      lp += categorical_logpmf(params.discretes[t.coords[a]], digits[a]);
    }
    t.eta_offset[k] = eta;
    t.log_prior[k] = lp;
    for (std::size_t a = 0; a < digits.size(); ++a) {
      if (++digits[a] <= t.radix[a]) break;
      digits[a] = 1;
    }
  }
  return t;
}

std::vector<int> completed_discrete(const SampleView& sample, const ComboTable& table,
                                    std::size_t k) {
  std::vector<int> out = sample.discrete;
  const auto levels = table.decode(k);
  for (std::size_t a = 0; a < table.coords.size(); ++a) out[table.coords[a]] = levels[a];
  return out;
}

Eigen::VectorXd completed_continuous(const SampleView& sample, const Eigen::VectorXd& x_mis) {
  if (static_cast<std::size_t>(x_mis.size()) != sample.mis_continuous.size())
    throw DataError("completed_continuous: imputation has wrong length");
  Eigen::VectorXd out = sample.continuous;
  for (std::size_t a = 0; a < sample.mis_continuous.size(); ++a)
    out(static_cast<Eigen::Index>(sample.mis_continuous[a])) = x_mis(static_cast<Eigen::Index>(a));
  return out;
}

}  // namespace mixsaem
