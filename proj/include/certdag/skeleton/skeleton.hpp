#pragma once

#include <map>
#include <optional>
#include <vector>

#include "certdag/core/types.hpp"
#include "certdag/stats/context.hpp"

namespace certdag::skeleton {

/// Pairs retained by the FDR-controlled marginal HSIC screen (M1).
struct Skeleton {
  int vertices = 0;
  std::vector<Pair> pairs;          // skeleton order
  std::map<Pair, double> marginal_p;  // every tested pair, retained or not

  bool contains(Pair p) const;
  std::vector<int> neighbours(int v) const;
};

/// Conditioning set that explains away a skeleton pair (M2).
struct MediatorVerdict {
  Pair pair;
  std::vector<int> mediated_by;
  int tier = 1;
  double p_conditional = 1.0;
};

/// Tests all V(V-1)/2 pairs marginally and applies Benjamini-Hochberg once at config.fdr_level.
Skeleton build_skeleton(stats::StatsContext& ctx);

/// Searches each skeleton pair in turn: tier 1 single common neighbours, tier 2 pairs of
/// common neighbours, tier 3 the union of both neighbourhoods (capped by marginal
/// dependence strength). The first tier whose residual HSIC accepts independence wins.
std::optional<MediatorVerdict> find_mediator(Pair p, const Skeleton& sk, stats::StatsContext& ctx);
std::map<Pair, MediatorVerdict> mediator_search(const Skeleton& sk, stats::StatsContext& ctx);

}  // namespace certdag::skeleton
