#include "certdag/stats/transforms.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numeric>
#include <random>

namespace certdag::stats {

std::uint64_t mix_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  auto splitmix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  };
  std::uint64_t h = splitmix(seed);
  for (std::uint64_t k : keys) h = splitmix(h ^ splitmix(k));
  return h;
}

double variance(const Eigen::VectorXd& x) {
  if (x.size() < 2) return 0.0;
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

bool is_constant(const Eigen::VectorXd& x, double rel_tol) {
  if (x.size() == 0) return true;
  double lo = x.minCoeff(), hi = x.maxCoeff();
  return hi - lo <= rel_tol * std::max(1.0, std::max(std::abs(lo), std::abs(hi)));
}

Eigen::VectorXd standardize(const Eigen::VectorXd& x) {
  Eigen::VectorXd c = x.array() - x.mean();
  double sd = std::sqrt(variance(x));
  if (!(sd > 0) || is_constant(x)) return Eigen::VectorXd::Zero(x.size());
  return c / sd;
}

Eigen::MatrixXd standardize_columns(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index c = 0; c < x.cols(); ++c) out.col(c) = standardize(x.col(c));
  return out;
}

Eigen::VectorXd ranks(const Eigen::VectorXd& x) {
  const auto n = static_cast<std::size_t>(x.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return x[a] < x[b]; });
  Eigen::VectorXd r(x.size());
  std::size_t k = 0;
  while (k < n) {
    std::size_t e = k;
    while (e + 1 < n && x[order[e + 1]] == x[order[k]]) ++e;
    double avg = 0.5 * static_cast<double>(k + e) + 1.0;
    for (std::size_t t = k; t <= e; ++t) r[order[t]] = avg;
    k = e + 1;
  }
  return r;
}

Eigen::VectorXd rank_gaussianize(const Eigen::VectorXd& x) {
  const double n = static_cast<double>(x.size());
  boost::math::normal_distribution<> nd;
  Eigen::VectorXd r = ranks(x);
  for (Eigen::Index k = 0; k < r.size(); ++k) r[k] = boost::math::quantile(nd, (r[k] - 0.5) / n);
  return r;
}

Eigen::VectorXd min_max_scale(const Eigen::VectorXd& x) {
  double lo = x.minCoeff(), hi = x.maxCoeff();
  if (!(hi > lo)) return Eigen::VectorXd::Zero(x.size());
  return (x.array() - lo) / (hi - lo);
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  Eigen::VectorXd a = x.array() - x.mean(), b = y.array() - y.mean();
  double d = std::sqrt(a.squaredNorm() * b.squaredNorm());
  return d > 0 ? a.dot(b) / d : 0.0;
}

std::vector<int> subsample_indices(int n, int m, std::uint64_t seed) {
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  if (m >= n) return idx;
  std::mt19937_64 rng(seed);
  // Partial Fisher-Yates.
  for (int k = 0; k < m; ++k) {
    std::uniform_int_distribution<int> pick(k, n - 1);
    std::swap(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(m));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Eigen::VectorXd take(const Eigen::VectorXd& x, const std::vector<int>& idx) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = x[idx[k]];
  return out;
}

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& x, const std::vector<int>& idx) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = x.row(idx[k]);
  return out;
}

}  // namespace certdag::stats
