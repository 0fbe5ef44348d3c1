#include "certdag/propagation/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "certdag/cascade/cascade.hpp"
#include "certdag/stats/hsic.hpp"
#include "certdag/stats/regression.hpp"
#include "certdag/stats/transforms.hpp"

namespace certdag::propagation {

using stats::Engine;

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::Acyclicity: return "ACYCLICITY";
    case Rule::MeekR1: return "MEEK_R1";
    case Rule::MeekR3: return "MEEK_R3";
    case Rule::Reaudit: return "REAUDIT";
    case Rule::TransitiveDsep: return "TRANSITIVE_DSEP";
  }
  return "?";
}

void PropagationReport::append(PropagationReport&& o) {
  new_commits.insert(new_commits.end(), o.new_commits.begin(), o.new_commits.end());
  drops.insert(drops.end(), o.drops.begin(), o.drops.end());
  for (auto& [k, v] : o.confirm_ratios) confirm_ratios[k] = v;
  for (auto& e : o.events) events.push_back(std::move(e));
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::string set_str(const std::vector<int>& s) {
  std::string out = "{";
  for (std::size_t k = 0; k < s.size(); ++k) out += (k ? "," : "") + std::to_string(s[k]);
  return out + "}";
}

void record_commit(PropagationReport& r, Mechanism m, Pair p, Direction d, Rule rule, double ratio,
                   std::string detail) {
  r.new_commits.push_back({p, d, rule, ratio});
  r.events.push_back({0, m, p, d == Direction::Fwd ? Action::CommitFwd : Action::CommitBwd, std::move(detail), 0.0});
}

bool commit_ok(const PartialDag& dag, Pair p, Direction d) {
  return dag.is_open(p) && dag.allowed(p, d) &&
         !dag.would_create_cycle(parent_of(p, d), child_of(p, d));
}

// Tries a gated rule candidate; returns true when committed.
bool try_rule(PartialDag& dag, stats::StatsContext* ctx, double threshold, Pair p, Direction d, Rule rule,
              PropagationReport& r, const std::string& why) {
  if (!commit_ok(dag, p, d)) return false;
  double ratio = 0.0;
  if (ctx && threshold > 0.0) {
    ratio = confirm_ratio(*ctx, p, d);
    r.confirm_ratios[p] = ratio;
    if (ratio < threshold) return false;
  }
  if (!dag.commit(p, d)) return false;
  std::string detail = std::string(to_string(rule)) + " " + why;
  if (ctx && threshold > 0.0) detail += " confirm_ratio=" + fmt(ratio);
  record_commit(r, Mechanism::M6, p, d, rule, ratio, std::move(detail));
  return true;
}

bool acyclicity_sweep(PartialDag& dag, PropagationReport& r) {
  bool changed = false;
  for (Pair p : dag.open_pairs()) {
    if (!dag.is_open(p)) continue;
    const bool fwd_cycles = dag.would_create_cycle(p.i, p.j);
    const bool bwd_cycles = dag.would_create_cycle(p.j, p.i);
    if (fwd_cycles == bwd_cycles) continue;
    const Direction d = fwd_cycles ? Direction::Bwd : Direction::Fwd;
    if (!dag.allowed(p, d) || !dag.commit(p, d)) continue;
    record_commit(r, Mechanism::M6, p, d, Rule::Acyclicity, 0.0,
                  "ACYCLICITY opposite orientation closes a directed cycle");
    changed = true;
  }
  return changed;
}

bool r1_sweep(PartialDag& dag, stats::StatsContext* ctx, double threshold, PropagationReport& r) {
  bool changed = false;
  const int n = dag.vertices();
  for (Pair p : dag.open_pairs()) {
    for (Direction d : {Direction::Fwd, Direction::Bwd}) {
      if (!dag.is_open(p)) break;
      const int b = parent_of(p, d), c = child_of(p, d);
      for (int a = 0; a < n; ++a) {
        if (a == b || a == c || !dag.has_edge(a, b) || dag.adjacent(a, c)) continue;
        if (try_rule(dag, ctx, threshold, p, d, Rule::MeekR1, r, std::to_string(a) + "->" + std::to_string(b))) {
          changed = true;
        }
        break;  // the ratio does not depend on which premise fired
      }
    }
  }
  return changed;
}

bool r3_sweep(PartialDag& dag, stats::StatsContext* ctx, double threshold, PropagationReport& r) {
  bool changed = false;
  const int n = dag.vertices();
  for (Pair p : dag.open_pairs()) {
    for (Direction d : {Direction::Fwd, Direction::Bwd}) {
      if (!dag.is_open(p)) break;
      const int a = parent_of(p, d), b = child_of(p, d);
      bool fired = false;
      for (int c = 0; c < n && !fired; ++c) {
        if (c == a || c == b || !dag.has_edge(c, b) || !dag.is_open(Pair::of(a, c))) continue;
        for (int e = c + 1; e < n; ++e) {
          if (e == a || e == b || !dag.has_edge(e, b) || !dag.is_open(Pair::of(a, e)) || dag.adjacent(c, e)) continue;
          fired = true;
          if (try_rule(dag, ctx, threshold, p, d, Rule::MeekR3, r,
                       std::to_string(c) + "->" + std::to_string(b) + "<-" + std::to_string(e)))
            changed = true;
          break;
        }
      }
    }
  }
  return changed;
}

// L0 then L1 decision on two residual streams; FWD means rx -> ry.
std::optional<Direction> residual_decision(stats::StatsContext& ctx, const std::string& key, const Eigen::VectorXd& rx,
                                           const Eigen::VectorXd& ry, std::string& why) {
  const Config& cfg = ctx.config();
  auto anm = [&](const Eigen::VectorXd& c, const Eigen::VectorXd& e, Engine eng, int dir) {
    return ctx.memo(key + (eng == Engine::Linear ? "|L" : "|N") + std::to_string(dir), [&] {
      if (stats::is_constant(c) || stats::is_constant(e)) return 1.0;
      auto seed = ctx.seed_for({0x7EA0u, std::hash<std::string>{}(key), static_cast<std::uint64_t>(eng),
                                static_cast<std::uint64_t>(dir)});
      auto f = stats::fit_regression(c, e, eng, seed, ctx.regression_options());
      return stats::hsic_test(c, f.residuals, ctx.hsic_options(), stats::mix_seed(seed, {1})).p_value;
    });
  };
  const double a = cfg.alpha_residual;
  for (Engine eng : {Engine::Linear, Engine::Nonlinear}) {
    const double pf = anm(rx, ry, eng, 0), pb = anm(ry, rx, eng, 1);
    const bool af = pf > a, ab = pb > a;
    if (af == ab) continue;
    const double margin = std::log10(std::max(af ? pf : pb, 1e-300) / std::max(af ? pb : pf, 1e-300));
    if (eng == Engine::Nonlinear && margin < cfg.l1_margin) continue;
    why = std::string(eng == Engine::Linear ? "L0" : "L1") + " on residuals p_fwd=" + fmt(pf) + " p_bwd=" + fmt(pb);
    return af ? Direction::Fwd : Direction::Bwd;
  }
  return std::nullopt;
}

}  // namespace

double confirm_ratio(stats::StatsContext& ctx, Pair p, Direction d) {
  const int from = parent_of(p, d), to = child_of(p, d);
  const double num = ctx.anm_p(from, to, Engine::Nonlinear);
  const double den = ctx.anm_p(to, from, Engine::Nonlinear);
  return num / std::max(den, 1e-300);
}

PropagationReport propagate(PartialDag& dag, stats::StatsContext* ctx, double threshold, bool skeleton_known) {
  PropagationReport r;
  if (!skeleton_known) return r;
  bool changed = true;
  while (changed) {
    changed = acyclicity_sweep(dag, r);
    changed = r1_sweep(dag, ctx, threshold, r) || changed;
    changed = r3_sweep(dag, ctx, threshold, r) || changed;
  }
  return r;
}

PropagationReport reaudit_conditioned(PartialDag& dag, stats::StatsContext& ctx) {
  PropagationReport r;
  const Config& cfg = ctx.config();
  for (Pair p : dag.open_pairs()) {
    if (!dag.is_open(p)) continue;
    auto px = dag.parents(p.i), py = dag.parents(p.j);
    if (px.empty() && py.empty()) continue;
    const Eigen::VectorXd& rx = ctx.residual(p.i, px, Engine::Nonlinear);
    const Eigen::VectorXd& ry = ctx.residual(p.j, py, Engine::Nonlinear);
    std::optional<Direction> d;
    std::string why;
    const std::string key = "reaudit:" + std::to_string(p.i) + set_str(px) + ":" + std::to_string(p.j) + set_str(py);
    if (cfg.reaudit_safe_tiers) {
      Eigen::MatrixXd m(rx.size(), 2);
      m << rx, ry;
      Dataset resid(std::move(m), {ctx.data().name(p.i), ctx.data().name(p.j)});
      stats::StatsContext sub(resid, cfg);
      auto v = cascade::run_cascade(Pair{0, 1}, sub);
      if (v.final) {
        d = v.final;
        why = "cascade on residuals committed_by=" + std::string(to_string(*v.committed_by));
      }
    } else {
      d = residual_decision(ctx, key, rx, ry, why);
    }
    if (!d || !commit_ok(dag, p, *d) || !dag.commit(p, *d)) continue;
    record_commit(r, Mechanism::M7, p, *d, Rule::Reaudit, 0.0,
                  "REAUDIT parents " + set_str(px) + " / " + set_str(py) + " " + why);
  }
  return r;
}

PropagationReport transitive_dsep(PartialDag& dag, stats::StatsContext& ctx) {
  PropagationReport r;
  for (Pair p : dag.open_pairs()) {
    if (!dag.is_open(p)) continue;
    std::vector<int> u = dag.parents(p.i);
    for (int v : dag.parents(p.j)) u.push_back(v);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    u.erase(std::remove_if(u.begin(), u.end(), [&](int v) { return p.contains(v); }), u.end());
    if (u.empty()) continue;
    const double pv = ctx.residual_hsic(p.i, u, p.j, u, Engine::Nonlinear).p_value;
    if (pv <= ctx.config().alpha_residual) continue;
    dag.drop(p);
    r.drops.push_back(p);
    r.events.push_back({0, Mechanism::M8, p, Action::Drop, "TRANSITIVE_DSEP given " + set_str(u) + " p=" + fmt(pv), 0.0});
  }
  return r;
}

PropagationReport auto_resolve(PartialDag& dag, stats::StatsContext& ctx, bool skeleton_known) {
  const Config& cfg = ctx.config();
  PropagationReport total;
  while (true) {
    const std::size_t before = total.resolved();
    if (cfg.propagation_enabled) total.append(propagate(dag, &ctx, cfg.confirm_ratio, skeleton_known));
    if (cfg.reaudit_enabled) total.append(reaudit_conditioned(dag, ctx));
    if (cfg.transitive_dsep_enabled) total.append(transitive_dsep(dag, ctx));
    if (total.resolved() == before) break;
  }
  return total;
}

}  // namespace certdag::propagation
