// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.
#include <algorithm>
#include <cmath>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "certdag/bench/bench.hpp"
#include "certdag/oracle/session.hpp"
#include "certdag/propagation/propagation.hpp"
#include "certdag/stats/hsic.hpp"
#include "certdag/stats/transforms.hpp"
#include "meek_oracle.hpp"

using namespace certdag;
namespace fs = std::filesystem;

namespace {

// Seeds differ from the calibration seed (1000) used to freeze the tier thresholds.
constexpr std::uint64_t kTierSeed = 1;
constexpr std::uint64_t kDagSeed = 7;
constexpr std::uint64_t kMeekSeed = 11;
constexpr std::uint64_t kHsicSeed = 13;

constexpr double kTierAccuracy = 0.93;
constexpr double kHsicLo = 0.03, kHsicHi = 0.07;
constexpr double kSachsPrecision = 0.60;
constexpr double kExactTol = 5e-4;  // three-decimal reporting
// Skeleton size of the reference sachs audit; the PIP2-PIP3 value-3 event presumes it.
constexpr std::size_t kReferenceSachsSkeleton = 19;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const char* name, const std::function<Outcome()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s [%d] %s: %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
  failures += o.pass ? 0 : 1;
}

std::string fmt3(double v) {
  char b[16];
  std::snprintf(b, sizeof b, "%.3f", v);
  return b;
}

std::vector<bench::Fixture> manifest() {
  return bench::load_manifest((fs::path(bench::fixture_dir()) / "manifest.json").string());
}

struct Loaded {
  Dataset data;
  std::vector<DirectedEdge> gt;
};

Loaded load(const std::string& name) {
  auto f = bench::find_fixture(manifest(), name);
  Loaded l{Dataset::from_csv(f.csv), {}};
  auto names = l.data.names();
  l.gt = bench::load_fixture_gt(f, names);
  return l;
}

std::vector<DirectedEdge> random_dag(int n, double p, std::mt19937_64& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(p);
  std::vector<DirectedEdge> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (coin(rng)) e.emplace_back(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
  return e;
}

bool same_edges(std::vector<DirectedEdge> a, std::vector<DirectedEdge> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

Config per_edge_config() {
  Config cfg;
  cfg.oracle_mode = OracleMode::PerEdge;
  return cfg;
}

oracle::RunResult per_edge_run(const Loaded& l) {
  oracle::GroundTruthBackend gt(l.data.vars(), l.gt);
  return oracle::run_iterative(l.data, per_edge_config(), gt);
}

Outcome one_plus_k() {
  const std::map<std::string, int> expected{{"asia", 7}, {"sachs_pgmpy", 8}, {"child", 14}, {"alarm", 27}};
  Outcome o{true, ""};
  for (const auto& f : manifest()) {
    auto it = expected.find(f.name);
    if (it == expected.end()) continue;
    std::vector<std::string> names;
    auto gt = bench::load_fixture_gt(f, names);
    oracle::GroundTruthBackend backend(f.vertices, gt);
    auto r = oracle::run_pure_metahub(f.vertices, backend, gt, names);
    auto ev = bench::evaluate(r.dag, gt, r.trace);
    const bool ok = r.interactions == it->second && ev.precision == 1.0 && ev.recall == 1.0 && ev.f1 == 1.0;
    o.pass = o.pass && ok;
    o.detail += f.name + " " + std::to_string(r.interactions) + "q P/R/F1 " + fmt3(ev.precision) + "/" +
                fmt3(ev.recall) + "/" + fmt3(ev.f1) + "; ";
  }
  return o;
}

Outcome random_dags() {
  std::mt19937_64 rng(kDagSeed);
  int exact = 0;
  for (int t = 0; t < 200; ++t) {
    const int n = 2 + static_cast<int>(rng() % 11);
    auto truth = random_dag(n, 0.3, rng);
    oracle::GroundTruthBackend gt(n, truth);
    auto r = oracle::run_pure_metahub(n, gt, truth);
    exact += r.interactions == 1 + oracle::nonleaf_count(n, truth) && same_edges(r.dag.committed_edges(), truth);
  }
  return {exact == 200, std::to_string(exact) + "/200 exact in 1+K"};
}

Outcome tier_matrix() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<bench::RegimeSpec> specs;
  for (auto r : bench::kAllRegimes) specs.push_back({r, 40, 2000, kTierSeed});
  Config cfg;
  cfg.seed = kTierSeed;  // data and statistics share the run seed, as in `certdag bench`
  auto m = bench::run_tier_matrix(specs, cfg);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  using bench::Regime;
  const std::vector<std::pair<Tier, Regime>> native{{Tier::LSNM, Regime::Lsnm},
                                                    {Tier::IGCI, Regime::NearDet},
                                                    {Tier::Stein, Regime::Lsnm},
                                                    {Tier::MDL, Regime::Discrete},
                                                    {Tier::PEIT, Regime::Pnl}};
  Outcome o{true, ""};
  for (auto [t, r] : native) {
    const auto& c = m.cells[t][r];
    const double acc = c.fired ? static_cast<double>(c.correct) / c.fired : 0.0;
    o.pass = o.pass && c.fired > 0 && acc >= kTierAccuracy;
    o.detail += std::string(to_string(t)) + " " + std::to_string(c.correct) + "/" + std::to_string(c.fired) + " ";
  }
  const int lsnm_lg = m.cells[Tier::LSNM][Regime::LinGauss].fired, igci_lg = m.cells[Tier::IGCI][Regime::LinGauss].fired;
  const int stein_disc = m.cells[Tier::Stein][Regime::Discrete].fired;
  o.pass = o.pass && lsnm_lg == 0 && igci_lg == 0 && stein_disc == 0 && secs < 600.0;
  o.detail += "| LIN_GAUSS fires LSNM " + std::to_string(lsnm_lg) + "/40 IGCI " + std::to_string(igci_lg) +
              "/40 | Stein on DISCRETE " + std::to_string(stein_disc) + " | " + std::to_string(static_cast<int>(secs)) +
              "s < 600s";
  return o;
}

Outcome hsic_calibration() {
  Config cfg;
  const auto opts = stats::hsic_options(cfg);
  int reject = 0;
  for (int s = 0; s < 1000; ++s) {
    std::mt19937_64 rng(stats::mix_seed(kHsicSeed, {static_cast<std::uint64_t>(s)}));
    std::normal_distribution<double> g;
    Eigen::VectorXd x(500), y(500);
    for (int k = 0; k < 500; ++k) x[k] = g(rng), y[k] = g(rng);
    reject += stats::hsic_test(x, y, opts, rng()).p_value < 0.05 ? 1 : 0;
  }
  const double rate = reject / 1000.0;
  return {rate >= kHsicLo && rate <= kHsicHi,
          "rejection rate " + fmt3(rate) + " in [" + fmt3(kHsicLo) + ", " + fmt3(kHsicHi) + "]"};
}

// Orientations of the open pairs of `g` that are acyclic and add no unshielded collider.
std::vector<std::vector<std::vector<int>>> consistent_extensions(const PartialDag& g) {
  const int n = g.vertices();
  const auto open = g.open_pairs();
  std::vector<std::vector<std::vector<int>>> out;
  for (std::uint32_t mask = 0; mask < (1u << open.size()); ++mask) {
    std::vector<std::vector<int>> d(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    std::vector<std::vector<int>> fixed = d;
    for (auto [a, b] : g.committed_edges()) d[a][b] = fixed[a][b] = 1;
    for (std::size_t k = 0; k < open.size(); ++k) {
      const Pair p = open[k];
      if (mask >> k & 1u) d[p.j][p.i] = 1;
      else d[p.i][p.j] = 1;
    }
    std::vector<DirectedEdge> edges;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        if (d[a][b]) edges.emplace_back(a, b);
    if (!is_acyclic(n, edges)) continue;
    bool ok = true;
    for (int c = 0; c < n && ok; ++c)
      for (int a = 0; a < n && ok; ++a)
        for (int b = a + 1; b < n && ok; ++b)
          if (d[a][c] && d[b][c] && !d[a][b] && !d[b][a] && !(fixed[a][c] && fixed[b][c])) ok = false;
    if (ok) out.push_back(d);
  }
  return out;
}

Outcome meek_equivalence() {
  std::mt19937_64 rng(kMeekSeed);
  int equal = 0, sound = 0;
  for (int t = 0; t < 100; ++t) {
    auto rp = testing::random_partial(5, 0.5, 0.3, rng);
    auto expect = testing::to_matrix(rp.dag);
    expect.close();
    PartialDag g = rp.dag;
    propagation::propagate(g, nullptr, 0.0);
    auto got = testing::to_matrix(g);
    equal += got.dir == expect.dir && got.und == expect.und;
    const auto ext = consistent_extensions(rp.dag);
    bool all = !ext.empty();
    for (auto [a, b] : g.committed_edges())
      for (const auto& d : ext) all = all && d[a][b];
    sound += all;
  }
  return {equal == 100 && sound == 100,
          std::to_string(equal) + "/100 equal to brute-force closure, " + std::to_string(sound) +
              "/100 forced orientations hold in every consistent extension"};
}

Outcome info_value_guarantee() {
  int answers = 0, violations = 0;
  std::string detail;
  bool pip_event = false, sachs_skeleton_reproduces = false;
  for (const char* name : {"asia", "sachs_853"}) {
    auto l = load(name);
    auto r = per_edge_run(l);
    int n = 0;
    for (const auto& h : r.history) {
      if (h.query.kind != oracle::QueryKind::PerEdge) continue;
      // The worst case ranges over orientations; an ABSENT answer is not one of them.
      if (h.answer.edge != oracle::EdgeAnswer::Fwd && h.answer.edge != oracle::EdgeAnswer::Bwd) continue;
      ++n;
      if (static_cast<double>(h.derived) < h.query.info_value) ++violations;
      if (std::string(name) == "sachs_853" && h.query.edge) {
        const auto& a = l.data.name(h.query.edge->i);
        const auto& b = l.data.name(h.query.edge->j);
        if (((a == "PIP2" && b == "PIP3") || (a == "PIP3" && b == "PIP2")) && h.query.info_value == 3.0) pip_event = true;
      }
    }
    if (std::string(name) == "sachs_853") {
      oracle::Session s(l.data, per_edge_config());
      s.audit();
      sachs_skeleton_reproduces = s.skeleton().pairs.size() >= kReferenceSachsSkeleton;
      detail += "sachs skeleton " + std::to_string(s.skeleton().pairs.size()) + " pairs";
    }
    answers += n;
    detail = std::string(name) + " " + std::to_string(n) + " oriented answers; " + detail;
  }
  const bool pass = violations == 0 && (!sachs_skeleton_reproduces || pip_event);
  return {pass, std::to_string(violations) + " violations over " + std::to_string(answers) + " oriented PER_EDGE answers (" +
                    detail + (sachs_skeleton_reproduces ? ", PIP2-PIP3 value-3 event " + std::string(pip_event ? "seen" : "missing")
                                                        : ", skeleton differs so the PIP2-PIP3 event is not checked") +
                    ")"};
}

Outcome sachs_ablation() {
  auto l = load("sachs_853");
  Config cfg;
  cfg.seed = kTierSeed;
  auto rows = bench::run_ablation(l.data, l.gt, cfg);
  auto row = [&](const std::string& label) {
    return *std::find_if(rows.begin(), rows.end(), [&](const auto& r) { return r.label == label; });
  };
  const auto base = row("BASE"), stein = row("+Stein"), guard = row("+all+guard");
  const bool trend = base.precision <= stein.precision && stein.precision <= guard.precision;
  std::string detail;
  for (const auto& r : rows)
    detail += r.label + " " + std::to_string(r.correct) + "/" + std::to_string(r.commits) + "=" + fmt3(r.precision) + " ";
  detail += "| guard demoted " + std::to_string(guard.demoted);
  return {trend && guard.demoted >= 1 && guard.precision >= kSachsPrecision, detail};
}

Outcome determinism() {
  auto l = load("asia");
  auto a = per_edge_run(l), b = per_edge_run(l);
  const std::string ca = a.trace.to_csv(), cb = b.trace.to_csv();
  const auto replayed = oracle::replay(Trace::from_csv_text(ca), l.data, per_edge_config());
  const bool ok = ca == cb && replayed == a.dag;
  return {ok, std::string("trace CSV ") + (ca == cb ? "byte-identical" : "differs") + " (" +
                  std::to_string(ca.size()) + " bytes), replay " + (replayed == a.dag ? "reproduces" : "diverges from") +
                  " the final DAG"};
}

Outcome asia_golden() {
  auto l = load("asia");
  auto r = per_edge_run(l);
  auto ev = bench::evaluate(r.dag, l.gt, r.trace);
  const bool ok = ev.committed == 6 && std::abs(ev.precision - 1.0) < kExactTol && std::abs(ev.recall - 0.75) < kExactTol;
  return {ok, std::to_string(ev.committed) + " commits, P " + fmt3(ev.precision) + " R " + fmt3(ev.recall) + ", " +
                  std::to_string(r.interactions) + " queries"};
}

}  // namespace

int main() {
  run(1, "1+K exactness (pure meta-hub, cascade disabled)", [] {
    const auto t0 = std::chrono::steady_clock::now();
    auto o = one_plus_k();
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.pass = o.pass && secs < 10.0;
    return o;
  });
  run(2, "random-DAG 1+K", random_dags);
  run(3, "tier matrix", tier_matrix);
  run(4, "HSIC calibration at N=500", hsic_calibration);
  run(5, "Meek-closure equivalence", meek_equivalence);
  run(6, "info-value worst-case guarantee", info_value_guarantee);
  run(7, "Sachs ablation trend", sachs_ablation);
  run(8, "determinism and replay", determinism);
  run(9, "asia golden trace (per-edge)", asia_golden);
  std::printf("%d failed\n", failures);
  return failures;
}
