#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>

#include "certdag/stats/hsic.hpp"

namespace certdag::stats {

enum class Engine : std::uint8_t { Linear, Nonlinear };

struct RegressionOptions {
  int landmarks = 100;  // Nystrom landmarks for the nonlinear engine
};

/// Fitted model; predicts on raw (unstandardized) predictor rows.
class Predictor {
 public:
  virtual ~Predictor() = default;
  virtual Eigen::VectorXd predict(const Eigen::MatrixXd& x) const = 0;
};

struct RegressionFit {
  Engine engine = Engine::Linear;
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;  // target - fitted
  double effective_dof = 0.0;  // trace of the hat matrix (includes the intercept)
  bool singular = false;       // every predictor column constant; fitted = mean(y)
  std::shared_ptr<const Predictor> predictor;

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const { return predictor->predict(x); }
};

/// LINEAR: ordinary least squares with intercept.
/// NONLINEAR: Gaussian-kernel ridge regression on Nystrom features (standardized inputs,
/// median-heuristic bandwidth, ridge and bandwidth multiplier chosen by generalized
/// cross-validation). Deterministic given `seed`. Requires at least 20 rows.
RegressionFit fit_regression(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Engine engine,
                             std::uint64_t seed, const RegressionOptions& opts = {});
RegressionFit fit_regression(const Eigen::VectorXd& x, const Eigen::VectorXd& y, Engine engine,
                             std::uint64_t seed, const RegressionOptions& opts = {});

struct HeteroscedasticityResult {
  double p_forward = 1.0;   // x -> y: HSIC(x, squared residuals of y ~ x)
  double p_backward = 1.0;  // y -> x
};

HeteroscedasticityResult heteroscedasticity_test(const Eigen::VectorXd& x, const Eigen::VectorXd& y,
                                                 const HsicOptions& hsic, std::uint64_t seed,
                                                 const RegressionOptions& opts = {});

}  // namespace certdag::stats
