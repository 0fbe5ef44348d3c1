#include "certdag/skeleton/skeleton.hpp"

#include <algorithm>
#include <limits>

#include "certdag/stats/fdr.hpp"

namespace certdag::skeleton {

using stats::Engine;

bool Skeleton::contains(Pair p) const { return std::binary_search(pairs.begin(), pairs.end(), p); }

std::vector<int> Skeleton::neighbours(int v) const {
  std::vector<int> out;
  for (const Pair& p : pairs)
    if (p.contains(v)) out.push_back(p.other(v));
  std::sort(out.begin(), out.end());
  return out;
}

Skeleton build_skeleton(stats::StatsContext& ctx) {
  Skeleton sk;
  sk.vertices = ctx.vars();
  std::vector<Pair> all;
  std::vector<double> p;
  for (int i = 0; i < sk.vertices; ++i)
    for (int j = i + 1; j < sk.vertices; ++j) {
      Pair pr{i, j};
      double pv = ctx.residual_hsic(i, {}, j, {}, Engine::Linear).p_value;
      all.push_back(pr);
      p.push_back(pv);
      sk.marginal_p[pr] = pv;
    }
  for (int k : stats::bh_fdr(p, ctx.config().fdr_level)) sk.pairs.push_back(all[static_cast<std::size_t>(k)]);
  std::sort(sk.pairs.begin(), sk.pairs.end());
  return sk;
}

namespace {

double marginal(const Skeleton& sk, int a, int b) {
  auto it = sk.marginal_p.find(Pair::of(a, b));
  return it == sk.marginal_p.end() ? 1.0 : it->second;
}

}  // namespace

std::optional<MediatorVerdict> find_mediator(Pair p, const Skeleton& sk, stats::StatsContext& ctx) {
  const Config& cfg = ctx.config();
  const auto nx = sk.neighbours(p.i), ny = sk.neighbours(p.j);
  std::vector<int> common;
  std::set_intersection(nx.begin(), nx.end(), ny.begin(), ny.end(), std::back_inserter(common));

  auto test = [&](const std::vector<int>& z, int tier) -> std::optional<MediatorVerdict> {
    double pv = ctx.residual_hsic(p.i, z, p.j, z, Engine::Nonlinear).p_value;
    if (pv > cfg.alpha_residual) return MediatorVerdict{p, z, tier, pv};
    return std::nullopt;
  };

  for (int z : common)
    if (auto v = test({z}, 1)) return v;
  if (cfg.mediator_max_tier < 2) return std::nullopt;

  for (std::size_t a = 0; a < common.size(); ++a)
    for (std::size_t b = a + 1; b < common.size(); ++b)
      if (auto v = test({common[a], common[b]}, 2)) return v;
  if (cfg.mediator_max_tier < 3) return std::nullopt;

  std::vector<int> blanket;
  std::set_union(nx.begin(), nx.end(), ny.begin(), ny.end(), std::back_inserter(blanket));
  blanket.erase(std::remove_if(blanket.begin(), blanket.end(), [&](int v) { return p.contains(v); }), blanket.end());
  if (blanket == common && blanket.size() <= 2) return std::nullopt;  // already covered by tiers 1-2
  if (static_cast<int>(blanket.size()) > cfg.mediator_max_conditioning) {
    auto strength = [&](int v) { return std::min(marginal(sk, v, p.i), marginal(sk, v, p.j)); };
    std::stable_sort(blanket.begin(), blanket.end(), [&](int a, int b) { return strength(a) < strength(b); });
    blanket.resize(static_cast<std::size_t>(cfg.mediator_max_conditioning));
    std::sort(blanket.begin(), blanket.end());
  }
  if (blanket.empty()) return std::nullopt;
  return test(blanket, 3);
}

std::map<Pair, MediatorVerdict> mediator_search(const Skeleton& sk, stats::StatsContext& ctx) {
  std::map<Pair, MediatorVerdict> out;
  for (const Pair& p : sk.pairs)
    if (auto v = find_mediator(p, sk, ctx)) out.emplace(p, *v);
  return out;
}

}  // namespace certdag::skeleton
