#include "mixsaem/simulation.hpp"

#include "mixsaem/distributions.hpp"

namespace mixsaem {

SyntheticDesign SyntheticDesign::reference() {
  SyntheticDesign d;
  d.n = 1000;
  d.discrete_probs.push_back((Eigen::VectorXd(2) << 0.5, 0.5).finished());
  d.discrete_probs.push_back((Eigen::VectorXd(5) << 0.1, 0.2, 0.3, 0.25, 0.15).finished());
  d.mean = Eigen::VectorXd::Zero(5);
  d.cov.resize(5, 5);
  d.cov << 4.0, 0.5, 0.2, 0.1, 0.3,
           0.5, 3.0, 0.1, 0.3, 0.2,
           0.2, 0.1, 2.0, 0.4, 0.5,
           0.1, 0.3, 0.4, 3.0, 0.2,
           0.3, 0.2, 0.5, 0.2, 5.0;
  d.beta.resize(8);
  d.beta << 0.0, -0.9, 0.01, 0.1, -0.6, 0.3, 0.01, 0.8;
  return d;
}

Schema SyntheticDesign::schema() const {
  Schema s;
  s.outcome = "y";
  std::size_t k = 1;
  for (const auto& p : discrete_probs) {
    VariableSchema v;
    v.name = "x" + std::to_string(k++);
    v.kind = VariableKind::Discrete;
    v.levels = static_cast<int>(p.size());
    s.columns.push_back(v);
  }
  for (Eigen::Index c = 0; c < mean.size(); ++c) {
    VariableSchema v;
    v.name = "x" + std::to_string(k++);
    v.kind = VariableKind::Continuous;
    s.columns.push_back(v);
  }
  return s;
}

ModelParams SyntheticDesign::truth() const {
  ModelParams p;
  p.encoding = DiscreteEncoding::LevelCode;
  p.beta = beta;
  p.gaussian = GaussianParams{mean, cov};
  for (const auto& probs : discrete_probs) p.discretes.push_back(CategoricalParams{probs});
  return p;
}

HybridDataset simulate(const SyntheticDesign& design, std::uint64_t seed) {
  const auto schema = design.schema();
  const auto l = design.discrete_probs.size();
  const auto h = static_cast<std::size_t>(design.mean.size());
  const auto truth = design.truth();
  truth.validate();
  const Eigen::MatrixXd lower = cholesky_lower(design.cov);

  Eigen::MatrixXd values(static_cast<Eigen::Index>(design.n), static_cast<Eigen::Index>(l + h));
  std::vector<int> outcomes(design.n);
  for (std::size_t i = 0; i < design.n; ++i) {
    Rng rng(derive_seed(seed, {i}));
    std::vector<int> discrete(l);
    for (std::size_t j = 0; j < l; ++j) discrete[j] = categorical_sample(truth.discretes[j], rng);
    const Eigen::VectorXd xc =
        design.mean + lower * standard_normal_vector(static_cast<Eigen::Index>(h), rng);
    const double p1 = sigmoid(truth.linear_predictor(discrete, xc));
    outcomes[i] = uniform01(rng) < p1 ? 1 : 0;
    const auto row = static_cast<Eigen::Index>(i);
    for (std::size_t j = 0; j < l; ++j) values(row, static_cast<Eigen::Index>(j)) = discrete[j];
    values.row(row).tail(static_cast<Eigen::Index>(h)) = xc.transpose();
  }
  BoolMatrix mask = BoolMatrix::Constant(values.rows(), values.cols(), true);
  return HybridDataset(schema, std::move(outcomes), std::move(values), std::move(mask));
}

MissingnessSpec reference_mcar(double rate, std::uint64_t seed) {
  MissingnessSpec s;
  s.mechanism = Mechanism::MCAR;
  s.rate = rate;
  s.target_columns = {0, 1, 2, 3, 4, 5, 6};
  s.seed = seed;
  return s;
}

MissingnessSpec reference_mar(double rate, std::uint64_t seed) {
  MissingnessSpec s;
  s.mechanism = Mechanism::MAR;
  s.rate = rate;
  s.target_columns = {0, 1, 3, 5};
  s.driver_columns = {2, 4, 6};
  s.seed = seed;
  return s;
}

}  // namespace mixsaem
