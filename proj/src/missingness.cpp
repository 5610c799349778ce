#include "mixsaem/missingness.hpp"

#include <algorithm>
#include <cmath>

#include "mixsaem/distributions.hpp"

namespace mixsaem {

namespace {

void check_rate(double rate) {
  if (!(rate > 0.0 && rate < 1.0)) throw DataError("missingness: rate must lie in (0, 1)");
}

void check_columns(const HybridDataset& ds, const std::vector<std::size_t>& cols,
                   const char* what) {
  for (const auto j : cols) {
    if (j >= ds.schema().size())
      throw DataError(std::string("missingness: ") + what + " column index out of range");
    if (!ds.mask().col(static_cast<Eigen::Index>(j)).all())
      throw DataError(std::string("missingness: ") + what + " column '" +
                      ds.schema().columns[j].name + "' must be fully observed");
  }
}

}  // namespace

HybridDataset inject_mcar(const HybridDataset& ds, const MissingnessSpec& spec) {
  check_rate(spec.rate);
  check_columns(ds, spec.target_columns, "target");
  BoolMatrix mask = ds.mask();
  Rng rng(spec.seed);
  // Column-major draw order: the stream for column k does not depend on
  // any cell value.
  for (const auto j : spec.target_columns)
    for (std::size_t i = 0; i < ds.rows(); ++i)
      if (uniform01(rng) < spec.rate)
        mask(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = false;
  return ds.with_mask(mask);
}

double calibrate_intercept(const Eigen::VectorXd& offsets, double rate) {
  check_rate(rate);
  auto mean_prob = [&](double alpha) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < offsets.size(); ++i) acc += sigmoid(alpha + offsets(i));
    return acc / static_cast<double>(offsets.size());
  };
  double lo = -30.0, hi = 30.0;
  if (mean_prob(lo) > rate || mean_prob(hi) < rate)
    throw DataError("missingness: MAR intercept calibration cannot bracket the target rate");
  for (int step = 0; step < 60; ++step) {
    const double mid = 0.5 * (lo + hi);
    (mean_prob(mid) < rate ? lo : hi) = mid;
  }
  const double alpha = 0.5 * (lo + hi);
  if (std::abs(mean_prob(alpha) - rate) > 0.005)
    throw DataError("missingness: MAR intercept calibration missed the target rate");
  return alpha;
}

HybridDataset inject_mar(const HybridDataset& ds, const MissingnessSpec& spec) {
  check_rate(spec.rate);
  check_columns(ds, spec.target_columns, "target");
  check_columns(ds, spec.driver_columns, "driver");
  if (spec.driver_columns.empty()) throw DataError("missingness: MAR needs driver columns");
  for (const auto t : spec.target_columns)
    if (std::find(spec.driver_columns.begin(), spec.driver_columns.end(), t) !=
        spec.driver_columns.end())
      throw DataError("missingness: a column cannot be both target and driver");
  if (!spec.driver_coefficients.empty() &&
      spec.driver_coefficients.size() != spec.target_columns.size())
    throw DataError("missingness: need one coefficient vector per target column");

  const auto n = static_cast<Eigen::Index>(ds.rows());
  const auto d = static_cast<Eigen::Index>(spec.driver_columns.size());
  Eigen::MatrixXd z(n, d);
  for (Eigen::Index c = 0; c < d; ++c) {
    const Eigen::VectorXd col =
        ds.values().col(static_cast<Eigen::Index>(spec.driver_columns[static_cast<std::size_t>(c)]));
    const double mean = col.mean();
    const double sd = n > 1 ? std::sqrt((col.array() - mean).square().sum() / static_cast<double>(n - 1))
                            : 0.0;
    z.col(c) = sd > 0.0 ? Eigen::VectorXd((col.array() - mean) / sd)
                        : Eigen::VectorXd(col.array() - mean);
  }

  BoolMatrix mask = ds.mask();
  Rng rng(spec.seed);
  for (std::size_t k = 0; k < spec.target_columns.size(); ++k) {
    const Eigen::VectorXd gamma = spec.driver_coefficients.empty()
                                      ? Eigen::VectorXd::Ones(d)
                                      : spec.driver_coefficients[k];
    if (gamma.size() != d) throw DataError("missingness: coefficient vector has wrong length");
    const Eigen::VectorXd offsets = z * gamma;
    const double alpha = calibrate_intercept(offsets, spec.rate);
    const auto j = static_cast<Eigen::Index>(spec.target_columns[k]);
    for (Eigen::Index i = 0; i < n; ++i)
      if (uniform01(rng) < sigmoid(alpha + offsets(i))) mask(i, j) = false;
  }
  return ds.with_mask(mask);
}

HybridDataset inject(const HybridDataset& ds, const MissingnessSpec& spec) {
  return spec.mechanism == Mechanism::MCAR ? inject_mcar(ds, spec) : inject_mar(ds, spec);
}

Mechanism parse_mechanism(const std::string& name) {
  if (name == "mcar" || name == "MCAR") return Mechanism::MCAR;
  if (name == "mar" || name == "MAR") return Mechanism::MAR;
  throw DataError("unknown missingness mechanism '" + name + "' (expected mcar or mar)");
}

std::string mechanism_name(Mechanism m) { return m == Mechanism::MCAR ? "mcar" : "mar"; }

}  // namespace mixsaem
