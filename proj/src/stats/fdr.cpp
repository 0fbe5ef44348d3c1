#include "certdag/stats/fdr.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace certdag::stats {

std::vector<int> bh_fdr(const std::vector<double>& p, double level) {
  const std::size_t m = p.size();
  for (double v : p)
    if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("bh_fdr: p-value outside [0, 1]");
  std::vector<int> order(m);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return p[a] < p[b]; });

  std::size_t k_max = 0;
  for (std::size_t k = 1; k <= m; ++k)
    if (p[order[k - 1]] <= static_cast<double>(k) / static_cast<double>(m) * level) k_max = k;

  std::vector<int> out(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k_max));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace certdag::stats
