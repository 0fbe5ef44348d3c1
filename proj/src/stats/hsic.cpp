#include "certdag/stats/hsic.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include "certdag/core/types.hpp"
#include "certdag/stats/transforms.hpp"

namespace certdag::stats {

namespace {

// Lower triangle (including the diagonal) of the Gaussian Gram matrix, in single precision;
// the exponentials dominate the cost of the test.
Eigen::MatrixXf lower_gram(const Eigen::VectorXd& x, double sigma) {
  const Eigen::Index n = x.size();
  const float inv = static_cast<float>(-1.0 / (2.0 * sigma * sigma));
  const Eigen::ArrayXf xf = x.cast<float>().array();
  Eigen::MatrixXf k(n, n);
  for (Eigen::Index j = 0; j < n; ++j) k.col(j).tail(n - j) = ((xf.tail(n - j) - xf[j]).square() * inv).exp().matrix();
  return k;
}

Eigen::VectorXd row_means(const Eigen::MatrixXf& lower) {
  const Eigen::Index n = lower.rows();
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sums[j] += lower.col(j).tail(n - j).cast<double>().sum();
    if (j + 1 < n) sums.tail(n - j - 1) += lower.col(j).tail(n - j - 1).cast<double>();
  }
  return sums / static_cast<double>(n);
}

Eigen::MatrixXd full_from_lower(const Eigen::MatrixXf& lower) {
  Eigen::MatrixXd k = lower.cast<double>();
  k.triangularView<Eigen::StrictlyUpper>() = k.transpose();
  return k;
}

// H K H in place.
void double_center(Eigen::MatrixXd& k) {
  Eigen::VectorXd mean = k.colwise().mean().transpose();  // symmetric: row means == column means
  double grand = mean.mean();
  k.colwise() -= mean;
  k.rowwise() -= mean.transpose();
  k.array() += grand;
}

}  // namespace

double median_bandwidth(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  const Eigen::Index stride = std::max<Eigen::Index>(1, n / 1000);
  std::vector<double> pts;
  for (Eigen::Index k = 0; k < n; k += stride) pts.push_back(x[k]);
  std::vector<double> d;
  d.reserve(pts.size() * (pts.size() - 1) / 2);
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b) d.push_back(std::abs(pts[a] - pts[b]));
  if (d.empty()) return 1.0;
  auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
  std::nth_element(d.begin(), mid, d.end());
  double med = *mid;
  if (!(med > 1e-12)) {
    // Heavily tied data: fall back to the mean positive distance.
    double s = 0.0;
    std::size_t c = 0;
    for (double v : d)
      if (v > 1e-12) s += v, ++c;
    med = c ? s / static_cast<double>(c) : 1.0;
  }
  return med;
}

HsicResult hsic_test(const Eigen::VectorXd& x_in, const Eigen::VectorXd& y_in, const HsicOptions& opts,
                     std::uint64_t seed) {
  if (x_in.size() != y_in.size()) throw std::invalid_argument("hsic_test: length mismatch");
  if (x_in.size() < 20) throw std::invalid_argument("hsic_test: need at least 20 samples");

  HsicResult res;
  res.method = opts.method;
  if (is_constant(x_in) || is_constant(y_in)) {
    res.degenerate = true;
    return res;
  }

  Eigen::VectorXd x = x_in, y = y_in;
  if (x.size() > opts.max_samples) {
    auto idx = subsample_indices(static_cast<int>(x.size()), opts.max_samples, mix_seed(seed, {0x5AB5u}));
    x = take(x_in, idx);
    y = take(y_in, idx);
  }
  const Eigen::Index n = x.size();
  const double nd = static_cast<double>(n);

  res.bandwidth_x = median_bandwidth(x);
  res.bandwidth_y = median_bandwidth(y);

  const Eigen::MatrixXf kx = lower_gram(x, res.bandwidth_x);
  const Eigen::MatrixXf ly = lower_gram(y, res.bandwidth_y);
  const Eigen::VectorXd ak = row_means(kx), al = row_means(ly);
  const double sum_k = ak.sum() * nd, sum_l = al.sum() * nd;

  if (opts.method == HsicMethod::Permutation) {
    Eigen::MatrixXd kc = full_from_lower(kx);
    const Eigen::MatrixXd l = full_from_lower(ly);
    double_center(kc);
    const double stat = (kc.array() * l.array()).sum() / (nd * nd);
    res.statistic = std::max(0.0, stat);
    std::mt19937_64 rng(seed);
    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    int exceed = 0;
    for (int b = 0; b < opts.permutations; ++b) {
      std::shuffle(perm.begin(), perm.end(), rng);
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double* lcol = l.col(perm[static_cast<std::size_t>(i)]).data();
        const double* kcol = kc.col(i).data();
        double acc = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) acc += kcol[j] * lcol[perm[static_cast<std::size_t>(j)]];
        s += acc;
      }
      if (s / (nd * nd) >= stat) ++exceed;
    }
    res.p_value = (1.0 + exceed) / (1.0 + opts.permutations);
    return res;
  }

  // Gamma approximation to the null distribution of n * HSIC_b. Centered entries
  // K_ij - a_i - a_j + g are formed on the fly over the lower triangle.
  const double gk = ak.mean(), gl = al.mean();
  double trace_sum = 0.0, off_sq = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const float* kcol = kx.col(j).data();
    const float* lcol = ly.col(j).data();
    const double cj = gk - ak[j], dj = gl - al[j];
    const double diag = (kcol[j] - ak[j] + cj) * (lcol[j] - al[j] + dj);
    trace_sum += diag;
    double tri = 0.0, tri_sq = 0.0;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double prod = (kcol[i] - ak[i] + cj) * (lcol[i] - al[i] + dj);
      tri += prod;
      tri_sq += prod * prod;
    }
    trace_sum += 2.0 * tri;
    off_sq += 2.0 * tri_sq;
  }
  const double test_stat = trace_sum / nd;
  res.statistic = std::max(0.0, test_stat / nd);

  double var_hsic = off_sq / 36.0 / nd / (nd - 1.0);
  var_hsic *= 72.0 * (nd - 4.0) * (nd - 5.0) / nd / (nd - 1.0) / (nd - 2.0) / (nd - 3.0);

  const double mu_x = (sum_k - nd) / nd / (nd - 1.0);
  const double mu_y = (sum_l - nd) / nd / (nd - 1.0);
  const double m_hsic = (1.0 + mu_x * mu_y - mu_x - mu_y) / nd;

  if (!(var_hsic > 0.0) || !(m_hsic > 0.0)) {
    res.p_value = 1.0;
    return res;
  }
  const double shape = m_hsic * m_hsic / var_hsic;
  const double scale = var_hsic * nd / m_hsic;
  res.p_value = test_stat <= 0.0 ? 1.0 : boost::math::gamma_q(shape, test_stat / scale);
  res.p_value = std::clamp(res.p_value, 0.0, 1.0);
  return res;
}

}  // namespace certdag::stats
