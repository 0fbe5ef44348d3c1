#pragma once

#include <Eigen/Dense>

namespace certdag::stats {

/// Kozachenko-Leonenko k-nearest-neighbour differential entropy (1-D, nats).
/// Returns -infinity when fewer than k + 1 distinct values exist. Zero neighbour
/// distances caused by ties are floored at half the smallest gap between distinct values.
double differential_entropy(const Eigen::VectorXd& x, int k = 3);

/// Plug-in Shannon entropy (nats) of integer-valued data.
double discrete_entropy(const Eigen::VectorXd& x);

}  // namespace certdag::stats
