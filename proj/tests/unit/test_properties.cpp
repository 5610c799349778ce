#include <doctest.h>

#include <cmath>
#include <random>

#include "mixsaem/metrics.hpp"
#include "mixsaem/missingness.hpp"
#include "mixsaem/prediction.hpp"
#include "mixsaem/saem.hpp"
#include "mixsaem/simulation.hpp"
#include "oracles.hpp"

using namespace mixsaem;

namespace {

constexpr int kCases = 200;

bool on_simplex(const std::vector<double>& w) {
  double s = 0.0;
  for (const double v : w) {
    if (!(v >= 0.0) || v > 1.0 + 1e-12) return false;
    s += v;
  }
  return std::abs(s - 1.0) < 1e-12;
}

}  // namespace

TEST_CASE("posterior weights and SA updates stay on the simplex") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < kCases; ++c) {
    const auto params = oracle::random_params(rng, {2, 3, 4}, 2, 2.0);
    const auto ds = oracle::random_dataset(rng, params, 6, 0.6);
    std::vector<SampleView> samples;
    std::vector<DiscretePosterior> a, b;
    for (std::size_t i = 0; i < ds.rows(); ++i) {
      samples.push_back(sample_view(ds, i));
      Eigen::VectorXd xc = samples.back().continuous;
      for (Eigen::Index k = 0; k < xc.size(); ++k)
        if (std::isnan(xc(k))) xc(k) = 3.0 * (u(rng) - 0.5);
      a.push_back(discrete_posterior(samples.back(), xc, params));
      xc = xc.array() + 0.5;
      b.push_back(discrete_posterior(samples.back(), xc, params));
      CHECK(on_simplex(a.back().weights));
      CHECK(on_simplex(b.back().weights));
    }
    const double delta = c == 0 ? 1.0 : u(rng);
    const auto mixed = sa_update_weights(a, b, delta);
    for (const auto& w : mixed) CHECK(on_simplex(w.weights));
    for (const auto& cat : mstep_discrete(samples, mixed, params.levels())) {
      std::vector<double> w(cat.probs.data(), cat.probs.data() + cat.probs.size());
      CHECK(on_simplex(w));
    }
  }
}

TEST_CASE("masks depend only on the seed and the drivers") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> z(0.0, 5.0);
  auto design = SyntheticDesign::reference();
  design.n = 60;
  for (int c = 0; c < kCases; ++c) {
    const auto ds = simulate(design, static_cast<std::uint64_t>(c));
    const auto spec = c % 2 == 0 ? reference_mcar(0.3, 1000 + c) : reference_mar(0.3, 1000 + c);
    // Scramble every targeted value and the outcomes; drivers stay fixed.
    Eigen::MatrixXd values = ds.values();
    std::vector<int> y = ds.outcomes();
    for (const auto j : spec.target_columns)
      for (Eigen::Index i = 0; i < values.rows(); ++i) {
        const auto col = static_cast<Eigen::Index>(j);
        values(i, col) = j < 2 ? double(1 + (values(i, col) == 1.0 ? 1 : 0)) : z(rng);
      }
    for (auto& v : y) v = 1 - v;
    const auto other = oracle::make_dataset(ds.schema(), y, values, ds.mask());
    CHECK((inject(ds, spec).mask() == inject(other, spec).mask()).all());
  }
}

TEST_CASE("AUC is invariant under strictly increasing transforms") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> z(0.0, 1.0);
  std::uniform_int_distribution<int> tie(0, 4);
  for (int c = 0; c < kCases; ++c) {
    const std::size_t n = 10 + static_cast<std::size_t>(c % 40);
    std::vector<double> s(n), t(n);
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = c % 3 == 0 ? tie(rng) : z(rng);
      y[i] = z(rng) + s[i] > 0 ? 1 : 0;
    }
    y[0] = 0;
    y[1] = 1;
    const double a = 0.1 + std::abs(z(rng));
    for (std::size_t i = 0; i < n; ++i) t[i] = std::exp(a * s[i]) + std::atan(s[i]);
    CHECK(auc(t, y) == auc(s, y));
  }
}

TEST_CASE("predicted class is invariant under positive scaling of the class scores") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.01, 100.0);
  for (int c = 0; c < kCases; ++c) {
    const auto params = oracle::random_params(rng, {2, 3}, 3, 1.5);
    const auto ds = oracle::random_dataset(rng, params, 1, 0.5);
    const auto s = sample_view(ds, 0);
    Rng r(static_cast<std::uint64_t>(c)), r2(static_cast<std::uint64_t>(c));
    const auto scores = predict_scores(s, params, 25, r);
    const double p = predict_proba(s, params, 25, r2);
    const double scale = u(rng);
    const int argmax = scores.score1 >= scores.score0 ? 1 : 0;
    const int scaled = scale * scores.score1 >= scale * scores.score0 ? 1 : 0;
    CHECK(argmax == scaled);
    if (!s.complete()) {
      CHECK(p == scores.score1 / scores.draws);
      if (std::abs(scores.score1 - scores.score0) > 1e-12 * scores.draws)
        CHECK(class_from_probability(p) == argmax);
    }
  }
}
