#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "certdag/stats/entropy.hpp"
#include "certdag/stats/fdr.hpp"
#include "certdag/stats/hsic.hpp"
#include "certdag/stats/regression.hpp"
#include "certdag/stats/shapiro_wilk.hpp"
#include "certdag/stats/transforms.hpp"

using namespace certdag;
using namespace certdag::stats;

namespace {

Eigen::VectorXd normal(int n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, sd);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

Eigen::VectorXd uniform(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(0.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

template <class F>
Eigen::VectorXd seq(int n, F f) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = f(i + 1);
  return v;
}

}  // namespace

TEST_CASE("bh_fdr step-up") {
  CHECK(bh_fdr({1.0, 1.0, 1.0}, 0.05).empty());
  CHECK(bh_fdr({0.001}, 0.05) == std::vector<int>{0});
  CHECK(bh_fdr({0.01, 0.02, 0.30, 0.90}, 0.05) == std::vector<int>{0, 1});
  // values cross-checked against statsmodels multipletests(method="fdr_bh")
  CHECK(bh_fdr({0.01, 0.04, 0.03, 0.045, 0.5}, 0.05) == std::vector<int>{0});
  CHECK(bh_fdr({}, 0.05).empty());
  CHECK_THROWS(bh_fdr({1.5}, 0.05));
}

TEST_CASE("bh_fdr rejection sets are monotone in the level") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 0.2);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> p(20);
    for (auto& v : p) v = u(rng);
    auto small = bh_fdr(p, 0.02), large = bh_fdr(p, 0.1);
    for (int k : small) CHECK(std::find(large.begin(), large.end(), k) != large.end());
  }
}

TEST_CASE("shapiro_wilk matches reference implementation") {
  // Reference values from scipy.stats.shapiro on the same deterministic inputs.
  struct Case {
    Eigen::VectorXd x;
    double w, p;
  };
  std::vector<Case> cases{
      {seq(25, [](int i) { return std::sin(0.7 * i) + 0.1 * i; }), 0.9753800097543928, 0.7811446976909965},
      {seq(8, [](int i) { return double(i) * i; }), 0.9289825737200884, 0.5068611922045083},
      {seq(300, [](int i) { return std::exp(std::sin(1.3 * i) * 1.5); }), 0.8328883734900199, 2.5211129224432918e-17},
      {seq(12, [](int i) { return std::sin(2.1 * i) + std::cos(0.37 * i); }), 0.9778366064630296, 0.9735433667514549},
      {(Eigen::VectorXd(3) << 1.0, 2.0, 4.0).finished(), 0.9642857142857142, 0.6368868450289689},
  };
  for (const auto& c : cases) {
    auto r = shapiro_wilk(c.x);
    CHECK(r.w == doctest::Approx(c.w).epsilon(1e-5));
    CHECK(r.p_value == doctest::Approx(c.p).epsilon(1e-3));
  }
}

TEST_CASE("shapiro_wilk behaviour") {
  auto constant = shapiro_wilk(Eigen::VectorXd::Constant(50, 2.0));
  CHECK(constant.degenerate);
  CHECK(constant.p_value == 0.0);

  Eigen::VectorXd e = uniform(1000, 3).unaryExpr([](double u) { return -std::log(1.0 - u); });
  CHECK(shapiro_wilk(e).p_value < 0.001);

  Eigen::VectorXd three = seq(300, [](int i) { return double(i % 3); });
  CHECK(shapiro_wilk(three).p_value < 1e-6);

  int rejections = 0;
  for (int s = 0; s < 400; ++s) rejections += shapiro_wilk(normal(1000, 1000 + s)).p_value < 0.05;
  CHECK(rejections >= 8);
  CHECK(rejections <= 32);

  // Long inputs are subsampled deterministically.
  auto big = normal(6000, 5);
  CHECK(shapiro_wilk(big, 1).p_value == shapiro_wilk(big, 1).p_value);
}

TEST_CASE("hsic gamma approximation matches reference computation") {
  // Frozen from an independent numpy implementation of the biased statistic with
  // upper-median bandwidths and the two-moment gamma null.
  Eigen::VectorXd x = seq(60, [](int i) { return std::sin(0.7 * i); });
  Eigen::VectorXd y = seq(60, [&](int i) { return std::cos(1.1 * i) + 0.5 * x[i - 1] * x[i - 1]; });
  CHECK(median_bandwidth(x) == doctest::Approx(0.7055499193987846).epsilon(1e-12));
  HsicOptions opts{HsicMethod::GammaApprox, 500, 2000};
  auto r = hsic_test(x, y, opts, 0);
  CHECK(r.statistic == doctest::Approx(0.0015362463582592664).epsilon(1e-9));
  CHECK(r.p_value == doctest::Approx(0.7274232620192269).epsilon(1e-6));
}

TEST_CASE("hsic degenerate, symmetric and deterministic") {
  auto y = normal(100, 1);
  auto r = hsic_test(Eigen::VectorXd::Constant(100, 3.0), y, {}, 0);
  CHECK(r.degenerate);
  CHECK(r.statistic == 0.0);
  CHECK(r.p_value == 1.0);

  auto x = normal(200, 2);
  auto z = normal(200, 3);
  for (auto m : {HsicMethod::GammaApprox, HsicMethod::Permutation}) {
    HsicOptions o{m, 200, 2000};
    auto a = hsic_test(x, z, o, 9), b = hsic_test(z, x, o, 9);
    CHECK(std::abs(a.statistic - b.statistic) < 1e-12);
    CHECK(hsic_test(x, z, o, 9).p_value == a.p_value);
  }
  CHECK_THROWS(hsic_test(normal(10, 1), normal(10, 2), {}, 0));
}

TEST_CASE("hsic detects y = x") {
  int hits = 0;
  for (int s = 0; s < 20; ++s) {
    auto x = uniform(500, 100 + s);
    hits += hsic_test(x, x, {HsicMethod::Permutation, 200, 2000}, s).p_value < 0.01;
    hits += hsic_test(x, x, {HsicMethod::GammaApprox, 200, 2000}, s).p_value < 0.01;
  }
  CHECK(hits == 40);
}

TEST_CASE("permutation hsic p-values are valid under independence") {
  int rejections = 0;
  const int reps = 100;
  for (int s = 0; s < reps; ++s)
    rejections += hsic_test(normal(200, 2 * s), normal(200, 2 * s + 1), {HsicMethod::Permutation, 200, 2000}, s)
                      .p_value <= 0.05;
  // P(p <= alpha) <= alpha + 1/B; binomial slack for 100 replicates.
  CHECK(rejections <= 12);
}

TEST_CASE("linear regression") {
  Eigen::VectorXd x = seq(50, [](int i) { return double(i); });
  Eigen::VectorXd y = 2.0 * x.array() + 1.0;
  auto f = fit_regression(x, y, Engine::Linear, 0);
  CHECK(f.residuals.cwiseAbs().maxCoeff() < 1e-8);
  auto pred = f.predict(Eigen::MatrixXd::Constant(1, 1, 100.0));
  CHECK(pred[0] == doctest::Approx(201.0));

  auto noisy = fit_regression(x, Eigen::VectorXd(y + normal(50, 4)), Engine::Linear, 0);
  CHECK(std::abs(noisy.residuals.mean()) < 1e-8 * std::sqrt(variance(noisy.residuals)) + 1e-12);

  auto c = fit_regression(Eigen::VectorXd(Eigen::VectorXd::Constant(30, 1.0)), normal(30, 5), Engine::Nonlinear, 0);
  CHECK(c.singular);
  auto t = normal(30, 5);
  CHECK((c.residuals - (t.array() - t.mean()).matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("nonlinear regression captures a cubic") {
  auto x = normal(1000, 11);
  Eigen::VectorXd y = x.array().cube() + 0.1 * normal(1000, 12).array();
  auto lin = fit_regression(x, y, Engine::Linear, 0);
  auto nl = fit_regression(x, y, Engine::Nonlinear, 0);
  CHECK(variance(nl.residuals) < 0.1 * variance(lin.residuals));
  CHECK((nl.residuals - (y - nl.fitted)).cwiseAbs().maxCoeff() < 1e-12);
  // Deterministic under a fixed seed.
  auto again = fit_regression(x, y, Engine::Nonlinear, 0);
  CHECK(again.residuals == nl.residuals);
  // Prediction on the training rows reproduces the fitted values.
  CHECK((nl.predict(Eigen::MatrixXd(x)) - nl.fitted).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("nonlinear regression with two predictors") {
  auto a = normal(800, 21), b = normal(800, 22);
  Eigen::MatrixXd x(800, 2);
  x << a, b;
  Eigen::VectorXd y = a.array().sin() + b.array().square() + 0.1 * normal(800, 23).array();
  auto nl = fit_regression(x, y, Engine::Nonlinear, 0);
  CHECK(variance(nl.residuals) < 0.05);
}

TEST_CASE("heteroscedasticity test") {
  int false_alarms = 0, hits = 0;
  for (int s = 0; s < 20; ++s) {
    auto x = normal(1000, 300 + s);
    Eigen::VectorXd homo = x + normal(1000, 400 + s);
    Eigen::VectorXd mult = x.array() * normal(1000, 500 + s).array();
    false_alarms += heteroscedasticity_test(x, homo, {}, s).p_forward < 0.01;
    hits += heteroscedasticity_test(x, mult, {}, s).p_forward < 0.01;
  }
  CHECK(false_alarms <= 2);
  CHECK(hits >= 18);
  auto r = heteroscedasticity_test(Eigen::VectorXd::Constant(200, 1.0), normal(200, 1), {}, 0);
  CHECK(r.p_forward == 1.0);
  CHECK(r.p_backward == 1.0);
}

TEST_CASE("differential entropy") {
  const double gauss = 0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e);
  auto z = normal(5000, 31);
  CHECK(std::abs(differential_entropy(z) - gauss) < 0.05);
  CHECK(std::abs(differential_entropy(uniform(5000, 32))) < 0.05);
  Eigen::VectorXd twice = 2.0 * z;
  CHECK(std::abs(differential_entropy(twice) - differential_entropy(z) - std::log(2.0)) < 0.05);
  Eigen::VectorXd few = seq(200, [](int i) { return double(i % 3); });
  CHECK(std::isinf(differential_entropy(few)));
  CHECK(discrete_entropy(seq(400, [](int i) { return double(i % 4); })) == doctest::Approx(std::log(4.0)));
}

TEST_CASE("transforms") {
  Eigen::VectorXd x(5);
  x << 3, 1, 2, 2, 5;
  Eigen::VectorXd r = ranks(x);
  CHECK(r[0] == 4.0);
  CHECK(r[2] == 2.5);
  CHECK(r[3] == 2.5);
  auto g = rank_gaussianize(x);
  CHECK(g[1] < 0.0);
  CHECK(g[4] > 0.0);
  auto s = standardize(normal(100, 3));
  CHECK(std::abs(s.mean()) < 1e-12);
  CHECK(variance(s) == doctest::Approx(1.0));
  CHECK(subsample_indices(100, 10, 5) == subsample_indices(100, 10, 5));
  CHECK(subsample_indices(100, 10, 5).size() == 10);
  CHECK(mix_seed(1, {2, 3}) != mix_seed(1, {3, 2}));
}
