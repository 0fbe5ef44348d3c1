#include "certdag/stats/entropy.hpp"

#include <algorithm>
#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace certdag::stats {

double differential_entropy(const Eigen::VectorXd& x_in, int k) {
  std::vector<double> x(x_in.data(), x_in.data() + x_in.size());
  std::sort(x.begin(), x.end());
  const auto n = static_cast<int>(x.size());

  double min_gap = std::numeric_limits<double>::infinity();
  int distinct = n > 0 ? 1 : 0;
  for (int i = 1; i < n; ++i)
    if (x[i] > x[i - 1]) {
      ++distinct;
      min_gap = std::min(min_gap, x[i] - x[i - 1]);
    }
  if (distinct < k + 1) return -std::numeric_limits<double>::infinity();
  const double floor = 0.5 * min_gap;

  // k-th neighbour distance: merge outward from i over the sorted array.
  double sum_log = 0.0;
  for (int i = 0; i < n; ++i) {
    int lo = i - 1, hi = i + 1;
    double r = 0.0;
    for (int step = 0; step < k; ++step) {
      const double dl = lo >= 0 ? x[i] - x[lo] : std::numeric_limits<double>::infinity();
      const double dh = hi < n ? x[hi] - x[i] : std::numeric_limits<double>::infinity();
      if (dl <= dh) r = dl, --lo;
      else r = dh, ++hi;
    }
    sum_log += std::log(std::max(r, floor));
  }
  using boost::math::digamma;
  return digamma(static_cast<double>(n)) - digamma(static_cast<double>(k)) + std::log(2.0) +
         sum_log / static_cast<double>(n);
}

double discrete_entropy(const Eigen::VectorXd& x) {
  std::map<double, int> counts;
  for (Eigen::Index i = 0; i < x.size(); ++i) ++counts[x[i]];
  const double n = static_cast<double>(x.size());
  double h = 0.0;
  for (const auto& [v, c] : counts) {
    const double p = c / n;
    h -= p * std::log(p);
  }
  return h;
}

}  // namespace certdag::stats
