#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace certdag::stats {

struct ShapiroWilkResult {
  double w = 0.0;
  double p_value = 0.0;
  bool degenerate = false;  // constant input; p = 0 by convention
};

/// Shapiro-Wilk test with Royston's (1995) coefficient and p-value approximations.
/// Inputs longer than 5000 are reduced to a seeded subsample of 5000. Requires n >= 3.
ShapiroWilkResult shapiro_wilk(const Eigen::VectorXd& x, std::uint64_t seed = 0);

}  // namespace certdag::stats
