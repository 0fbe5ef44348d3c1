#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <initializer_list>
#include <vector>

namespace certdag::stats {

/// splitmix64 finalizer; used to derive per-test seeds from the run seed.
std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys);

/// Zero mean, unit variance; constant input maps to all zeros.
Eigen::VectorXd standardize(const Eigen::VectorXd& x);
Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x);

bool is_constant(const Eigen::VectorXd& x, double rel_tol = 1e-12);

/// Average ranks in [1, n].
Eigen::VectorXd ranks(const Eigen::VectorXd& x);
/// Phi^{-1}((rank - 0.5) / n).
Eigen::VectorXd rank_gaussianize(const Eigen::VectorXd& x);
/// Affine map onto [0, 1].
Eigen::VectorXd min_max_scale(const Eigen::VectorXd& x);

double variance(const Eigen::VectorXd& x);
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Deterministic subsample of `m` distinct row indices out of `n` (sorted), seeded.
std::vector<int> subsample_indices(int n, int m, std::uint64_t seed);
Eigen::VectorXd take(const Eigen::VectorXd& x, const std::vector<int>& idx);
Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<int>& idx);

}  // namespace certdag::stats
