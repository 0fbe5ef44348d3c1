#include "certdag/bench/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "certdag/oracle/session.hpp"

#ifndef CERTDAG_DEFAULT_FIXTURE_DIR
#define CERTDAG_DEFAULT_FIXTURE_DIR "fixtures"
#endif

namespace certdag::bench {

using nlohmann::json;

nlohmann::json EvalReport::to_json() const {
  return {{"precision", precision},   {"recall", recall},     {"f1", f1},
          {"precision_defined", precision_defined},           {"committed", committed},
          {"correct", correct},       {"gt_edges", gt_edges}, {"queries", queries},
          {"commits_by_mechanism", commits_by_mechanism}};
}

EvalReport evaluate(const std::vector<DirectedEdge>& committed, const std::vector<DirectedEdge>& gt) {
  const std::set<DirectedEdge> truth(gt.begin(), gt.end());
  const std::set<DirectedEdge> got(committed.begin(), committed.end());
  EvalReport r;
  r.committed = static_cast<int>(got.size());
  r.gt_edges = static_cast<int>(truth.size());
  for (const auto& e : got) r.correct += truth.count(e) ? 1 : 0;
  r.precision_defined = r.committed > 0;
  r.precision = r.precision_defined ? static_cast<double>(r.correct) / r.committed : 0.0;
  r.recall = r.gt_edges > 0 ? static_cast<double>(r.correct) / r.gt_edges : 0.0;
  r.f1 = r.precision + r.recall > 0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  return r;
}

EvalReport evaluate(const PartialDag& dag, const std::vector<DirectedEdge>& gt, const Trace& trace) {
  auto r = evaluate(dag.committed_edges(), gt);
  std::map<Pair, Mechanism> last;
  for (const auto& e : trace.events()) {
    if (e.action == Action::Query) ++r.queries;
    if (e.edge && (e.action == Action::CommitFwd || e.action == Action::CommitBwd)) last[*e.edge] = e.mechanism;
  }
  for (auto [a, b] : dag.committed_edges()) {
    auto it = last.find(Pair::of(a, b));
    if (it != last.end()) ++r.commits_by_mechanism[std::string(to_string(it->second))];
  }
  return r;
}

std::string fixture_dir() {
  if (const char* env = std::getenv("CERTDAG_FIXTURES"); env && *env) return env;
  return CERTDAG_DEFAULT_FIXTURE_DIR;
}

std::vector<Fixture> load_manifest(const std::string& path) {
  auto bad = [&](const std::string& m) { return CertdagError("MALFORMED_MANIFEST", path + ": " + m); };
  std::ifstream in(path);
  if (!in) throw bad("cannot open");
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.contains("fixtures") || !j["fixtures"].is_array()) throw bad("expected {\"fixtures\": [...]}");
  const auto dir = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) { return p.empty() ? p : (dir / p).string(); };
  std::vector<Fixture> out;
  for (const auto& f : j["fixtures"]) {
    try {
      out.push_back({f.at("name").get<std::string>(), resolve(f.value("csv", std::string())),
                     resolve(f.at("gt").get<std::string>()), f.at("V").get<int>(), f.at("gt_edges").get<int>(),
                     f.at("K").get<int>()});
    } catch (const json::exception& e) {
      throw bad(e.what());
    }
  }
  return out;
}

Fixture find_fixture(const std::vector<Fixture>& all, const std::string& name) {
  for (const auto& f : all)
    if (f.name == name) return f;
  throw CertdagError("MALFORMED_MANIFEST", "no fixture named " + name);
}

std::vector<DirectedEdge> load_fixture_gt(const Fixture& f, std::vector<std::string>& names) {
  std::ifstream in(f.gt);
  if (!in) throw CertdagError("MALFORMED_GT", "cannot open " + f.gt);
  std::stringstream ss;
  ss << in.rdbuf();
  if (names.empty()) names = oracle::edge_list_names(ss.str());
  auto gt = oracle::parse_edge_list(ss.str(), names);
  const int v = static_cast<int>(names.size());
  if (v != f.vertices || static_cast<int>(gt.size()) != f.gt_edges || oracle::nonleaf_count(v, gt) != f.k)
    throw CertdagError("MALFORMED_MANIFEST", f.name + ": V / edges / K disagree with the ground truth file");
  return gt;
}

std::vector<AblationRow> run_ablation(const Dataset& data, const std::vector<DirectedEdge>& gt, const Config& base) {
  const TierMask base_mask = TierMask::of({Tier::L0, Tier::L1, Tier::L2});
  auto plus = [&](Tier t) {
    TierMask m = base_mask;
    m.set(t);
    return m;
  };
  const std::vector<std::tuple<std::string, TierMask, bool>> rows{
      {"BASE", base_mask, false},           {"+IGCI", plus(Tier::IGCI), false},
      {"+LSNM", plus(Tier::LSNM), false},   {"+Stein", plus(Tier::Stein), false},
      {"+all", TierMask::all(), false},     {"+all+guard", TierMask::all(), true}};
  const std::set<DirectedEdge> truth(gt.begin(), gt.end());
  std::vector<AblationRow> out;
  for (const auto& [label, mask, guard] : rows) {
    Config c = base;
    c.tier_mask = mask;
    c.guard_enabled = guard;
    c.cascade_enabled = true;
    c.propagation_enabled = c.reaudit_enabled = c.transitive_dsep_enabled = false;
    oracle::Session s(data, c);
    s.audit();
    AblationRow r{label};
    for (const auto& e : s.dag().committed_edges()) {
      ++r.commits;
      r.correct += truth.count(e) ? 1 : 0;
    }
    r.queries_left = static_cast<int>(s.dag().count(PairState::Open));
    r.precision = r.commits ? static_cast<double>(r.correct) / r.commits : 0.0;
    for (const auto& e : s.trace().events()) r.demoted += e.action == Action::Demote ? 1 : 0;
    out.push_back(r);
  }
  return out;
}

TierMatrix run_tier_matrix(const std::vector<RegimeSpec>& specs, const Config& config) {
  TierMatrix m;
  for (const auto& spec : specs) {
    for (Tier t : kLatticeOrder) m.cells[t][spec.regime].pairs += spec.n_pairs;
    for (const auto& pair : generate_regime(spec)) {
      stats::StatsContext ctx(pair.data, config);
      for (Tier t : kLatticeOrder) {
        auto d = cascade::tier_decide(t, ctx, Pair{0, 1});
        auto& cell = m.cells[t][spec.regime];
        cell.gated += d.gate_passed ? 1 : 0;
        if (auto dir = cascade::direction_of(d.outcome)) {
          ++cell.fired;
          cell.correct += *dir == pair.truth ? 1 : 0;
        }
      }
    }
  }
  return m;
}

std::string TierMatrix::to_csv() const {
  std::ostringstream o;
  o << "tier,regime,pairs,gated,fired,correct\n";
  for (const auto& [t, row] : cells)
    for (const auto& [r, c] : row)
      o << to_string(t) << ',' << to_string(r) << ',' << c.pairs << ',' << c.gated << ',' << c.fired << ','
        << c.correct << '\n';
  return o.str();
}

std::string TierMatrix::to_table() const {
  std::ostringstream o;
  o << "tier   ";
  for (Regime r : kAllRegimes) o << ' ' << std::string(to_string(r)) + std::string(13 - to_string(r).size(), ' ');
  o << '\n';
  for (const auto& [t, row] : cells) {
    std::string name(to_string(t));
    o << name << std::string(7 - std::min<std::size_t>(7, name.size()), ' ');
    for (Regime r : kAllRegimes) {
      auto it = row.find(r);
      std::string cell = it == row.end() || it->second.abstain()
                             ? "abstain"
                             : std::to_string(it->second.correct) + "/" + std::to_string(it->second.fired);
      o << ' ' << cell << std::string(13 - std::min<std::size_t>(13, cell.size()), ' ');
    }
    o << '\n';
  }
  return o.str();
}

std::vector<ParetoPoint> run_pareto(const Dataset& data, const std::vector<DirectedEdge>& gt, const Config& config,
                                    int safe_queries) {
  std::vector<ParetoPoint> out;
  {
    Config c = config;
    c.oracle_mode = OracleMode::PerEdge;
    oracle::GroundTruthBackend backend(data.vars(), gt);
    oracle::Session s(data, c, oracle::QuestionTemplates::defaults(), backend.known_k());
    for (int q = 0; q < safe_queries; ++q) {
      auto next = s.next_query();
      if (!next) break;
      s.answer(backend.answer(*next));
    }
    out.push_back({"SAFE_ONLY", s.interactions(), evaluate(s.dag(), gt, s.trace())});
  }
  {
    Config c = config;
    c.oracle_mode = OracleMode::MetahubChildren;
    oracle::GroundTruthBackend backend(data.vars(), gt);
    auto r = oracle::run_iterative(data, c, backend);
    out.push_back({"CASCADE_METAHUB", r.interactions, evaluate(r.dag, gt, r.trace)});
  }
  {
    oracle::GroundTruthBackend backend(data.vars(), gt);
    auto r = oracle::run_pure_metahub(data.vars(), backend, std::nullopt, data.names());
    out.push_back({"PURE_METAHUB", r.interactions, evaluate(r.dag, gt, r.trace)});
  }
  return out;
}

}  // namespace certdag::bench
