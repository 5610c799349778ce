#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "mixsaem/mh_sampler.hpp"
#include "oracles.hpp"

using namespace mixsaem;

namespace {

SampleView view_with_mask(const ModelParams& params, std::mt19937_64& rng,
                          const std::vector<bool>& observed, int y = 1) {
  auto ds = oracle::random_dataset(rng, params, 1, 0.0);
  BoolMatrix mask(1, static_cast<Eigen::Index>(observed.size()));
  for (std::size_t j = 0; j < observed.size(); ++j) mask(0, static_cast<Eigen::Index>(j)) = observed[j];
  Eigen::MatrixXd values = ds.values();
  return sample_view(oracle::make_dataset(ds.schema(), {y}, values, mask), 0);
}

}  // namespace

TEST_CASE("zero coefficients: target is the proposal shifted by log 0.5") {
  std::mt19937_64 rng(1);
  auto params = oracle::random_params(rng, {3}, 3);
  params.beta.setZero();
  const auto s = view_with_mask(params, rng, {true, true, false, false});
  const SampleTarget target(s, params);
  Rng r(2);
  for (int k = 0; k < 10; ++k) {
    const Eigen::VectorXd x = target.proposal().sample(r);
    CHECK(target.log_target(x) - target.proposal_logpdf(x) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
    CHECK(target_unnormalized_logdensity(x, s, params) == target.log_target(x));
  }
}

TEST_CASE("zero coefficients with a missing uniform binary discrete") {
  std::mt19937_64 rng(2);
  auto params = oracle::random_params(rng, {2}, 2);
  params.beta.setZero();
  params.discretes[0].probs << 0.5, 0.5;
  const auto s = view_with_mask(params, rng, {false, true, false});
  const SampleTarget target(s, params);
  CHECK(target.combos().size() == 2);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.7);
  CHECK(target.log_target(x) - target.proposal_logpdf(x) == doctest::Approx(std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("normalized target matches quadrature at test points") {
  const auto t = oracle::tiny();
  const SampleTarget target(t.sample, t.params);
  const double m = t.cond_mean(), sd = std::sqrt(t.cond_var());
  const double z_oracle = t.integrate([](double) { return 1.0; });
  const double z_target = oracle::simpson(
      [&](double c) { return std::exp(target.log_target(Eigen::VectorXd::Constant(1, c))); },
      m - 14 * sd, m + 14 * sd, 20000);
  for (const double c : {-2.0, -0.5, 0.0, 0.9, 2.5}) {
    const double mine = std::exp(target.log_target(Eigen::VectorXd::Constant(1, c))) / z_target;
    const double ref = t.f(c) / z_oracle;
    CHECK(std::abs(mine - ref) <= 1e-6 * ref);
    CHECK(std::abs(target.outcome_loglik(Eigen::VectorXd::Constant(1, c)) - std::log(t.outcome_lik(c))) < 1e-12);
  }
}

TEST_CASE("zero coefficients accept every proposal") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    auto params = oracle::random_params(rng, {2, 3}, 4);
    params.beta.setZero();
    const auto s = view_with_mask(params, rng, {rep % 2 == 0, true, false, true, false, rep % 3 == 0},
                                  rep % 2);
    Rng r(static_cast<std::uint64_t>(rep));
    const auto out = mh_sample(s, params, MhConfig{20, 0}, r);
    CHECK(out.diagnostics.proposed == 20);
    CHECK(out.diagnostics.acceptance_rate() == 1.0);
  }
}

TEST_CASE("acceptance is 1 when only coefficients on observed coordinates are nonzero") {
  std::mt19937_64 rng(4);
  for (int rep = 0; rep < 30; ++rep) {
    auto params = oracle::random_params(rng, {3}, 3, 2.0);
    // Coordinates: d1 observed, c1 observed, c2 and c3 missing.
    params.beta(3) = 0.0;
    params.beta(4) = 0.0;
    const auto s = view_with_mask(params, rng, {true, true, false, false});
    Rng r(static_cast<std::uint64_t>(rep));
    CHECK(mh_sample(s, params, MhConfig{20, 0}, r).diagnostics.acceptance_rate() == 1.0);
  }
}

TEST_CASE("forced rejection returns the initial draw") {
  const auto t = oracle::tiny();
  const SampleTarget target(t.sample, t.params);
  Rng a(42), b(42);
  const auto out = mh_sample(target, MhConfig{1, 0}, a,
                             [] { return std::numeric_limits<double>::infinity(); });
  const Eigen::VectorXd first = target.proposal().sample(b);
  CHECK(out.x_mis(0) == first(0));
  CHECK(out.diagnostics.accepted == 0);
  CHECK(out.diagnostics.proposed == 1);
}

TEST_CASE("log ratio: general form equals the outcome likelihood ratio") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    const auto params = oracle::random_params(rng, {2, 4}, 3, 1.5);
    const auto s = view_with_mask(params, rng, {rep % 2 == 0, false, true, false, false}, rep % 2);
    const SampleTarget target(s, params);
    Rng r(static_cast<std::uint64_t>(rep));
    const Eigen::VectorXd x_old = target.proposal().sample(r);
    const Eigen::VectorXd x_new = target.proposal().sample(r);
    const double general = independence_log_ratio(target.log_target(x_new), target.proposal_logpdf(x_new),
                                                  target.log_target(x_old), target.proposal_logpdf(x_old));
    const double simple = target.outcome_loglik(x_new) - target.outcome_loglik(x_old);
    CHECK(std::abs(general - simple) < 1e-10);
  }
}

TEST_CASE("acceptance rule") {
  CHECK(mh_accept(0.0, 0.999999));
  CHECK(mh_accept(5.0, 0.0));
  CHECK_FALSE(mh_accept(0.0, std::numeric_limits<double>::infinity()));
  CHECK(mh_accept(std::log(0.3), 0.29));
  CHECK_FALSE(mh_accept(std::log(0.3), 0.31));
  CHECK(snap_log_ratio(1e-17, -3, -2, -3, -2) == 0.0);
  CHECK(snap_log_ratio(-1e-6, -3, -2, -3, -2) == -1e-6);
}

TEST_CASE("two-state surrogate satisfies detailed balance") {
  // Target f and independence proposal g on {0, 1}; the chain uses the
  // library's ratio and acceptance functions.
  const double f[2] = {0.8, 0.2};
  const double g[2] = {0.35, 0.65};
  const int steps = 100000;
  Rng rng(6);
  int state = 0;
  double counts[2][2] = {{0, 0}, {0, 0}};
  double visits[2] = {0, 0};
  for (int s = 0; s < steps; ++s) {
    const int prop = uniform01(rng) < g[1] ? 1 : 0;
    const double lr = independence_log_ratio(std::log(f[prop]), std::log(g[prop]),
                                             std::log(f[state]), std::log(g[state]));
    const int next = mh_accept(lr, uniform01(rng)) ? prop : state;
    counts[state][next] += 1;
    visits[state] += 1;
    state = next;
  }
  // Analytic off-diagonal transition probabilities.
  const double p01 = g[1] * std::min(1.0, f[1] * g[0] / (f[0] * g[1]));
  const double p10 = g[0] * std::min(1.0, f[0] * g[1] / (f[1] * g[0]));
  const double e01 = counts[0][1] / visits[0];
  const double e10 = counts[1][0] / visits[1];
  CHECK(std::abs(e01 - p01) < 3 * std::sqrt(p01 * (1 - p01) / visits[0]));
  CHECK(std::abs(e10 - p10) < 3 * std::sqrt(p10 * (1 - p10) / visits[1]));
  CHECK(f[0] * p01 == doctest::Approx(f[1] * p10).epsilon(1e-12));
  const double occupancy = visits[0] / steps;
  CHECK(std::abs(occupancy - f[0]) < 0.01);
}

TEST_CASE("pooled chain output matches quadrature posterior moments") {
  const auto t = oracle::tiny(1, 1.6);
  const SampleTarget target(t.sample, t.params);
  const double z = t.integrate([](double) { return 1.0; });
  const double mean = t.integrate([](double c) { return c; }) / z;
  const double var = t.integrate([&](double c) { return (c - mean) * (c - mean); }) / z;
  const double m4 = t.integrate([&](double c) { return std::pow(c - mean, 4); }) / z;

  const int n = 20000;
  double s1 = 0.0, s2 = 0.0;
  std::vector<double> draws(n);
  for (int k = 0; k < n; ++k) {
    Rng rng(derive_seed(123, {static_cast<std::uint64_t>(k)}));
    draws[static_cast<std::size_t>(k)] = mh_sample(target, MhConfig{20, 0}, rng).x_mis(0);
    s1 += draws[static_cast<std::size_t>(k)];
  }
  const double emp_mean = s1 / n;
  for (const double d : draws) s2 += (d - emp_mean) * (d - emp_mean);
  const double emp_var = s2 / (n - 1);
  CHECK(std::abs(emp_mean - mean) < 3 * std::sqrt(var / n));
  CHECK(std::abs(emp_var - var) < 3 * std::sqrt((m4 - var * var) / n));
  // The posterior is visibly different from the proposal.
  CHECK(std::abs(mean - t.cond_mean()) > 10 * std::sqrt(var / n));
}

TEST_CASE("errors") {
  std::mt19937_64 rng(7);
  const auto params = oracle::random_params(rng, {2}, 2);
  const auto complete = view_with_mask(params, rng, {false, true, true});
  Rng r(1);
  CHECK_THROWS_AS(mh_sample(complete, params, MhConfig{5, 0}, r), DataError);
  const auto t = oracle::tiny();
  CHECK_THROWS_AS(mh_sample(t.sample, t.params, MhConfig{0, 0}, r), DataError);

  // 13 missing binary covariates exceed the enumeration cap.
  std::vector<int> levels(13, 2);
  const auto wide = oracle::random_params(rng, levels, 1);
  std::vector<bool> observed(14, false);
  const auto s = view_with_mask(wide, rng, observed);
  CHECK_THROWS_AS(SampleTarget(s, wide), EnumerationCapError);
  std::vector<bool> twelve(14, false);
  twelve[0] = true;
  CHECK_NOTHROW(SampleTarget(view_with_mask(wide, rng, twelve), wide));
}
