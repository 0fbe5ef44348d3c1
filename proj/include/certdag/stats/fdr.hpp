#pragma once

#include <vector>

namespace certdag::stats {

/// Benjamini-Hochberg step-up. Returns the rejected indices in ascending order.
std::vector<int> bh_fdr(const std::vector<double>& p_values, double level);

}  // namespace certdag::stats
