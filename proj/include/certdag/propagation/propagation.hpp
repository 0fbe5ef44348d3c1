#pragma once

#include <map>
#include <vector>

#include "certdag/core/partial_dag.hpp"
#include "certdag/core/trace.hpp"
#include "certdag/stats/context.hpp"

namespace certdag::propagation {

enum class Rule : std::uint8_t { Acyclicity, MeekR1, MeekR3, Reaudit, TransitiveDsep };
std::string_view to_string(Rule r);

struct RuleCommit {
  Pair pair;
  Direction direction = Direction::Fwd;
  Rule rule = Rule::Acyclicity;
  double confirm_ratio = 0.0;  // 0 when no gate was applied
};

/// What one auto-resolution pass changed. `events` mirrors the mutations one-to-one
/// (round left at 0 for the caller to stamp).
struct PropagationReport {
  std::vector<RuleCommit> new_commits;
  std::vector<Pair> drops;
  std::map<Pair, double> confirm_ratios;  // every gated candidate, committed or not
  std::vector<TraceEvent> events;

  std::size_t resolved() const { return new_commits.size() + drops.size(); }
  void append(PropagationReport&& other);
};

/// Bivariate confirm ratio for orienting `p` as `d`: nonlinear-ANM residual-independence
/// p-value in the candidate direction over the p-value in the opposite direction.
double confirm_ratio(stats::StatsContext& ctx, Pair p, Direction d);

/// Acyclicity, Meek R1 and Meek R3 to fixpoint (M6). Each sweep scans open pairs in
/// skeleton order. R1/R3 candidates need confirm_ratio >= config.confirm_ratio unless the
/// gate is disabled (confirm_ratio <= 0) or `ctx` is null; acyclicity-forced orientations
/// are not gated. Without `skeleton_known` OPEN pairs are not assumed adjacent and nothing
/// is forced: all three rules presume every OPEN pair is a true adjacency.
PropagationReport propagate(PartialDag& dag, stats::StatsContext* ctx, double confirm_threshold,
                            bool skeleton_known = true);

/// M7: residualize both endpoints of each open pair on their committed parents and rerun
/// the L0 / L1 decision on the residuals (or the full cascade with reaudit_safe_tiers).
PropagationReport reaudit_conditioned(PartialDag& dag, stats::StatsContext& ctx);

/// M8: drop open pairs whose residuals on the union of committed parents are independent.
PropagationReport transitive_dsep(PartialDag& dag, stats::StatsContext& ctx);

/// M6-M8 to joint fixpoint, honouring the config switches.
PropagationReport auto_resolve(PartialDag& dag, stats::StatsContext& ctx, bool skeleton_known = true);

}  // namespace certdag::propagation
