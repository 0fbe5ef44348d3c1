#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "certdag/bench/regimes.hpp"
#include "certdag/core/config.hpp"
#include "certdag/core/partial_dag.hpp"
#include "certdag/core/trace.hpp"

namespace certdag::bench {

/// Direction-aware edge-wise scores against a ground-truth DAG.
struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  bool precision_defined = false;  // false when nothing was committed (precision reported as 0)
  int committed = 0;
  int correct = 0;
  int gt_edges = 0;
  int queries = 0;
  std::map<std::string, int> commits_by_mechanism;

  nlohmann::json to_json() const;
};

EvalReport evaluate(const std::vector<DirectedEdge>& committed, const std::vector<DirectedEdge>& gt);
/// Also fills queries (total bits) and per-mechanism commit counts from the trace; a
/// commit later demoted or reversed is attributed to the mechanism of the surviving event.
EvalReport evaluate(const PartialDag& dag, const std::vector<DirectedEdge>& gt, const Trace& trace);

/// One manifest entry. Paths are resolved against the manifest's directory; `csv` is
/// empty for ground-truth-only fixtures.
struct Fixture {
  std::string name;
  std::string csv;
  std::string gt;
  int vertices = 0;
  int gt_edges = 0;
  int k = 0;
};

/// Directory holding the fixture manifest: $CERTDAG_FIXTURES when set, else the
/// build-time default.
std::string fixture_dir();
/// Throws CertdagError("MALFORMED_MANIFEST").
std::vector<Fixture> load_manifest(const std::string& path);
Fixture find_fixture(const std::vector<Fixture>& all, const std::string& name);

/// Ground truth of a fixture on `names` (the dataset header, or the edge-list names when
/// the fixture has no CSV). Checks V, edge count and K against the manifest.
std::vector<DirectedEdge> load_fixture_gt(const Fixture& f, std::vector<std::string>& names);

struct AblationRow {
  std::string label;
  int commits = 0;
  int correct = 0;
  int queries_left = 0;
  double precision = 0.0;
  int demoted = 0;
};

/// Round-1 cascade on each configuration (BASE = L0, L1, L2; then +IGCI, +LSNM,
/// +Stein, +all, +all+guard). Auto-resolution is off so the rows isolate the tiers.
std::vector<AblationRow> run_ablation(const Dataset& data, const std::vector<DirectedEdge>& gt, const Config& base);

struct TierCell {
  int fired = 0;
  int correct = 0;
  int gated = 0;  // pairs whose gate passed
  int pairs = 0;
  bool abstain() const { return fired == 0; }
};

struct TierMatrix {
  std::map<Tier, std::map<Regime, TierCell>> cells;
  std::string to_csv() const;
  std::string to_table() const;
};

TierMatrix run_tier_matrix(const std::vector<RegimeSpec>& specs, const Config& config);

struct ParetoPoint {
  std::string strategy;
  int queries = 0;
  EvalReport eval;
};

/// SAFE-only (cascade plus `safe_queries` per-edge queries), cascade with meta-hub and
/// node-children queries, and the pure meta-hub protocol, each against a ground-truth oracle.
std::vector<ParetoPoint> run_pareto(const Dataset& data, const std::vector<DirectedEdge>& gt, const Config& config,
                                    int safe_queries = 5);

}  // namespace certdag::bench
