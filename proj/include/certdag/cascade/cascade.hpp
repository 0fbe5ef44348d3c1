#pragma once

#include <json.hpp>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "certdag/core/config.hpp"
#include "certdag/core/dataset.hpp"
#include "certdag/core/types.hpp"
#include "certdag/stats/context.hpp"

namespace certdag::cascade {

enum class Outcome : std::uint8_t { Fwd, Bwd, Abstain };
std::string_view to_string(Outcome o);
inline std::optional<Direction> direction_of(Outcome o) {
  if (o == Outcome::Fwd) return Direction::Fwd;
  if (o == Outcome::Bwd) return Direction::Bwd;
  return std::nullopt;
}

struct TierDecision {
  Tier tier = Tier::L0;
  Outcome outcome = Outcome::Abstain;
  bool gate_passed = false;
  std::map<std::string, double> scores;
};

/// Statistics every verdict carries, whichever tiers are enabled; classify_impossible
/// reads only these.
struct PairEvidence {
  double lin_p_fwd = 1.0, lin_p_bwd = 1.0;  // HSIC p of linear ANM residuals, i->j and j->i
  double nl_p_fwd = 1.0, nl_p_bwd = 1.0;    // same with the nonlinear engine
  double sw_i = 1.0, sw_j = 1.0;            // Shapiro-Wilk p of each marginal
  double hoc = 0.0;                         // pairwise cumulant statistic (L2)
  double dispersion_i = 0.0, dispersion_j = 0.0;  // variance / mean of the raw columns
};

struct CascadeVerdict {
  Pair pair;
  std::vector<TierDecision> decisions;  // lattice order, enabled tiers only
  PairEvidence evidence;
  std::optional<Direction> final;       // set iff certificate == RESOLVED_DECISIVE
  CertificateCode certificate = CertificateCode::ImpossibleAmbiguous;
  std::optional<Tier> committed_by;     // tier whose commit stands (or was demoted)
  bool demoted = false;                 // guard fired
  std::optional<Tier> demoted_by;

  const TierDecision* decision(Tier t) const;
  nlohmann::json to_json() const;
};

/// Precondition gates. L0, L1, L2 always pass; MDL and PEIT need at least one marginal
/// rejecting Gaussianity at gauss_gate_p, IGCI needs both; Stein additionally needs both variables
/// non-integer; LSNM needs the heteroscedasticity test to reject at hetero_gate_p one way.
bool gate(Tier tier, stats::StatsContext& ctx, Pair p);

/// Gate, then the tier's decisiveness rule on the standardized pair.
TierDecision tier_decide(Tier tier, stats::StatsContext& ctx, Pair p);

PairEvidence gather_evidence(stats::StatsContext& ctx, Pair p);

/// Lattice resolution over precomputed decisions: the first committing enabled tier wins,
/// then the L0 guard, then classification of the remainder.
CascadeVerdict resolve(Pair p, const std::vector<TierDecision>& all, const PairEvidence& ev, TierMask mask,
                       bool guard, const VariableMeta& mi, const VariableMeta& mj, const Config& cfg);

/// Evaluates the enabled tiers (plus the guard tiers when the guard is on) and resolves.
CascadeVerdict run_cascade(Pair p, stats::StatsContext& ctx);

/// Certificate for a pair no tier could orient.
CertificateCode classify_impossible(const PairEvidence& ev, const VariableMeta& mi, const VariableMeta& mj,
                                    const Config& cfg);

}  // namespace certdag::cascade
