#include "certdag/cascade/cascade.hpp"

#include <algorithm>

namespace certdag::cascade {

namespace {

constexpr Tier kGuardTiers[] = {Tier::IGCI, Tier::Stein, Tier::MDL};

const TierDecision* find(const std::vector<TierDecision>& all, Tier t) {
  for (const auto& d : all)
    if (d.tier == t) return &d;
  return nullptr;
}

}  // namespace

const TierDecision* CascadeVerdict::decision(Tier t) const { return find(decisions, t); }

nlohmann::json CascadeVerdict::to_json() const {
  nlohmann::json j;
  j["certificate"] = to_string(certificate);
  j["final"] = final ? std::string(to_string(*final)) : std::string("IMPOSSIBLE");
  j["committed_by"] = committed_by ? std::string(to_string(*committed_by)) : std::string("NONE");
  if (demoted) j["demoted_by"] = to_string(*demoted_by);
  j["evidence"] = {{"lin_p_fwd", evidence.lin_p_fwd}, {"lin_p_bwd", evidence.lin_p_bwd},
                   {"nl_p_fwd", evidence.nl_p_fwd},   {"nl_p_bwd", evidence.nl_p_bwd},
                   {"sw_i", evidence.sw_i},           {"sw_j", evidence.sw_j},
                   {"hoc", evidence.hoc}};
  auto tiers = nlohmann::json::object();
  for (const auto& d : decisions) {
    nlohmann::json t{{"outcome", to_string(d.outcome)}, {"gate", d.gate_passed}};
    for (const auto& [k, v] : d.scores) t[k] = v;
    tiers[std::string(to_string(d.tier))] = t;
  }
  j["tiers"] = tiers;
  return j;
}

CascadeVerdict resolve(Pair p, const std::vector<TierDecision>& all, const PairEvidence& ev, TierMask mask,
                       bool guard, const VariableMeta& mi, const VariableMeta& mj, const Config& cfg) {
  CascadeVerdict v;
  v.pair = p;
  v.evidence = ev;
  for (Tier t : kLatticeOrder)
    if (mask.has(t))
      if (const auto* d = find(all, t)) v.decisions.push_back(*d);

  for (const auto& d : v.decisions) {
    if (auto dir = direction_of(d.outcome)) {
      v.final = dir;
      v.committed_by = d.tier;
      break;
    }
  }

  if (guard && v.committed_by == Tier::L0) {
    for (Tier t : kGuardTiers) {
      if (!mask.has(t)) continue;
      const auto* d = find(all, t);
      if (d && direction_of(d->outcome) == opposite(*v.final)) {
        v.demoted = true;
        v.demoted_by = t;
        break;
      }
    }
  }

  if (v.final && !v.demoted) {
    v.certificate = CertificateCode::ResolvedDecisive;
  } else if (v.demoted) {
    v.final.reset();
    v.certificate = CertificateCode::ImpossibleL0DisagreesWithHighTier;
  } else {
    v.certificate = classify_impossible(ev, mi, mj, cfg);
  }
  return v;
}

CascadeVerdict run_cascade(Pair p, stats::StatsContext& ctx) {
  const Config& cfg = ctx.config();
  std::vector<TierDecision> all;
  for (Tier t : kLatticeOrder) {
    bool needed = cfg.tier_mask.has(t);
    if (needed) all.push_back(tier_decide(t, ctx, p));
  }
  return resolve(p, all, gather_evidence(ctx, p), cfg.tier_mask, cfg.guard_enabled, ctx.data().meta(p.i),
                 ctx.data().meta(p.j), cfg);
}

}  // namespace certdag::cascade
