#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "certdag/core/config.hpp"

namespace certdag::stats {

struct HsicResult {
  double statistic = 0.0;  // biased V-statistic, (1/n^2) tr(K H L H)
  double p_value = 1.0;
  HsicMethod method = HsicMethod::GammaApprox;
  double bandwidth_x = 1.0;
  double bandwidth_y = 1.0;
  bool degenerate = false;  // one input constant
};

struct HsicOptions {
  HsicMethod method = HsicMethod::GammaApprox;
  int permutations = 500;
  int max_samples = 2000;
};

/// Median pairwise distance (deterministic stride subsample above 1000 points).
/// Falls back to 1 for (near-)constant input.
double median_bandwidth(const Eigen::VectorXd& x);

/// HSIC independence test with Gaussian kernels and median-heuristic bandwidths.
/// Constant input yields statistic 0 and p-value 1. Requires x.size() == y.size() >= 20.
HsicResult hsic_test(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const HsicOptions& opts,
                     std::uint64_t seed);

inline HsicOptions hsic_options(const Config& c) { return {c.hsic_method, c.permutations, c.hsic_max_samples}; }

}  // namespace certdag::stats
