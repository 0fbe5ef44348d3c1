#include "certdag/stats/shapiro_wilk.hpp"

#include <algorithm>
#include <array>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "certdag/stats/transforms.hpp"

namespace certdag::stats {

namespace {

template <std::size_t K>
double poly(const std::array<double, K>& c, double x) {
  double r = 0.0;
  for (std::size_t i = K; i-- > 0;) r = r * x + c[i];
  return r;
}

constexpr std::array<double, 6> kC1{0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
constexpr std::array<double, 6> kC2{0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr std::array<double, 2> kG{-2.273, 0.459};
constexpr std::array<double, 4> kC3{0.544, -0.39978, 0.025054, -6.714e-4};
constexpr std::array<double, 4> kC4{1.3822, -0.77857, 0.062767, -0.0020322};
constexpr std::array<double, 4> kC5{-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr std::array<double, 3> kC6{-0.4803, -0.082676, 0.0030302};

}  // namespace

ShapiroWilkResult shapiro_wilk(const Eigen::VectorXd& x_in, std::uint64_t seed) {
  if (x_in.size() < 3) throw std::invalid_argument("shapiro_wilk: need at least 3 samples");
  ShapiroWilkResult res;
  if (is_constant(x_in)) {
    res.degenerate = true;
    return res;
  }
  Eigen::VectorXd xs = x_in;
  if (xs.size() > 5000) xs = take(x_in, subsample_indices(static_cast<int>(x_in.size()), 5000, seed));

  std::vector<double> x(xs.data(), xs.data() + xs.size());
  std::sort(x.begin(), x.end());
  const std::size_t n = x.size();
  const double an = static_cast<double>(n);

  // Coefficients a_i (antisymmetric; only the upper half is stored).
  std::vector<double> a(n, 0.0);
  if (n == 3) {
    a[2] = std::numbers::sqrt2 / 2.0;
    a[0] = -a[2];
  } else {
    boost::math::normal_distribution<> nd;
    std::vector<double> m(n);
    for (std::size_t i = 0; i < n; ++i)
      m[i] = boost::math::quantile(nd, (static_cast<double>(i + 1) - 0.375) / (an + 0.25));
    double summ2 = 0.0;
    for (double v : m) summ2 += v * v;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double an_last = poly(kC1, rsn) + m[n - 1] / ssumm2;
    std::size_t i1;
    double phi;
    if (n > 5) {
      const double an_prev = poly(kC2, rsn) + m[n - 2] / ssumm2;
      phi = (summ2 - 2.0 * m[n - 1] * m[n - 1] - 2.0 * m[n - 2] * m[n - 2]) /
            (1.0 - 2.0 * an_last * an_last - 2.0 * an_prev * an_prev);
      a[n - 1] = an_last;
      a[n - 2] = an_prev;
      i1 = 2;
    } else {
      phi = (summ2 - 2.0 * m[n - 1] * m[n - 1]) / (1.0 - 2.0 * an_last * an_last);
      a[n - 1] = an_last;
      i1 = 1;
    }
    const double sphi = std::sqrt(phi);
    for (std::size_t i = i1; i < n - i1; ++i) a[i] = m[i] / sphi;
    for (std::size_t i = 0; i < i1; ++i) a[i] = -a[n - 1 - i];
  }

  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= an;
  double ssq = 0.0, num = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ssq += (x[i] - mean) * (x[i] - mean);
    num += a[i] * x[i];
  }
  double w = std::min(1.0, num * num / ssq);
  res.w = w;

  boost::math::normal_distribution<> nd;
  if (n == 3) {
    const double p = 6.0 / std::numbers::pi * (std::asin(std::sqrt(w)) - std::asin(std::sqrt(0.75)));
    res.p_value = std::clamp(p, 0.0, 1.0);
    return res;
  }
  const double y = std::log1p(-w);
  double z;
  if (n <= 11) {
    const double gamma = poly(kG, an);
    if (y >= gamma) {
      res.p_value = 1e-99;
      return res;
    }
    const double y2 = -std::log(gamma - y);
    const double mu = poly(kC3, an);
    const double sigma = std::exp(poly(kC4, an));
    z = (y2 - mu) / sigma;
  } else {
    const double xx = std::log(an);
    const double mu = poly(kC5, xx);
    const double sigma = std::exp(poly(kC6, xx));
    z = (y - mu) / sigma;
  }
  res.p_value = std::clamp(boost::math::cdf(boost::math::complement(nd, z)), 0.0, 1.0);
  return res;
}

}  // namespace certdag::stats
