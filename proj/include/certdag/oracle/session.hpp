#pragma once

#include <json.hpp>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <vector>

#include "certdag/cascade/cascade.hpp"
#include "certdag/core/config.hpp"
#include "certdag/core/dataset.hpp"
#include "certdag/core/partial_dag.hpp"
#include "certdag/core/trace.hpp"
#include "certdag/oracle/oracle.hpp"
#include "certdag/oracle/templates.hpp"
#include "certdag/propagation/propagation.hpp"
#include "certdag/skeleton/skeleton.hpp"
#include "certdag/stats/context.hpp"

namespace certdag::oracle {

/// Per-pair audit record. `certificate` is empty for pairs the cascade never saw
/// (outside the skeleton, or cascade disabled).
struct EdgeRecord {
  Pair pair;
  std::optional<CertificateCode> certificate;
  std::optional<Mechanism> provenance;  // who set the current state, if not OPEN
  nlohmann::json evidence = nlohmann::json::object();
};

struct QueryRecord {
  int round = 0;
  OracleQuery query;
  OracleAnswer answer;
  std::size_t derived = 0;  // auto-resolutions triggered by the answer
  bool inconsistent = false;
};

struct AnswerOutcome {
  propagation::PropagationReport report;
  bool inconsistent = false;
  std::string message;
};

enum class SessionStatus : std::uint8_t { Created, AwaitingAnswer, Propagating, Done };
std::string_view to_string(SessionStatus s);

/// Algorithm state for one dataset: round 1 (skeleton, mediators, cascade), round 2
/// (auto-resolution), then one round per oracle interaction. Every mutation of the graph
/// is recorded as a trace event and applied through apply_event, so folding the trace
/// always reproduces dag().
class Session {
 public:
  /// `known_k` sizes the meta-hub query; without it config.metahub_k is used.
  Session(Dataset data, Config config, QuestionTemplates templates = QuestionTemplates::defaults(),
          std::optional<int> known_k = std::nullopt);
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Rounds 1 and 2. Called implicitly by next_query().
  void audit();
  /// Pending query, computing one if needed; empty once the residual is exhausted.
  std::optional<OracleQuery> next_query();
  const std::optional<OracleQuery>& pending() const { return pending_; }
  /// Applies an answer to the pending query. Throws CertdagError("NO_PENDING_QUERY") or
  /// ("INVALID_ANSWER"). An answer that would close a cycle leaves the pair OPEN, is
  /// reported as inconsistent, and the pair is not asked again.
  AnswerOutcome answer(const OracleAnswer& a);

  /// Worst-case (or expected, per config) number of auto-resolutions after orienting `p`.
  double info_value(Pair p);

  SessionStatus status() const { return status_; }
  const Dataset& data() const { return data_; }
  const Config& config() const { return config_; }
  const PartialDag& dag() const { return dag_; }
  const Trace& trace() const { return trace_; }
  const skeleton::Skeleton& skeleton() const { return skeleton_; }
  const std::map<Pair, EdgeRecord>& records() const { return records_; }
  const std::map<Pair, cascade::CascadeVerdict>& verdicts() const { return verdicts_; }
  const std::vector<QueryRecord>& history() const { return history_; }
  int interactions() const { return static_cast<int>(history_.size()); }
  int round() const { return round_; }
  stats::StatsContext& stats() { return *ctx_; }

  /// Certificate report: committed edges, open residual with question texts, per-pair records.
  nlohmann::json report() const;
  /// Vertices, committed / open / dropped pairs by name.
  nlohmann::json dag_json() const;

 private:
  void emit(TraceEvent e);
  void emit_all(std::vector<TraceEvent> events, int round);
  void note_resolutions(const propagation::PropagationReport& r);
  std::optional<OracleQuery> choose_query();
  std::optional<OracleQuery> best_edge_query();
  std::optional<OracleQuery> recovery_query();
  std::optional<OracleQuery> children_query(bool hubs_only);
  OracleQuery edge_query(Pair p, Mechanism m, double value);
  std::map<std::string, std::string> question_vars(Pair p) const;
  propagation::PropagationReport run_auto_resolve(int round);

  Dataset data_;
  Config config_;
  QuestionTemplates templates_;
  std::optional<int> known_k_;
  std::unique_ptr<stats::StatsContext> ctx_;

  PartialDag dag_;
  Trace trace_;
  skeleton::Skeleton skeleton_;
  std::map<Pair, cascade::CascadeVerdict> verdicts_;
  std::map<Pair, EdgeRecord> records_;
  std::vector<QueryRecord> history_;

  SessionStatus status_ = SessionStatus::Created;
  std::optional<OracleQuery> pending_;
  int round_ = 0;
  bool hubs_asked_ = false;
  std::vector<int> hubs_;
  std::set<int> children_asked_;
  std::set<Pair> skipped_;
  std::set<Pair> recovery_asked_;
};

struct RunResult {
  PartialDag dag;
  Trace trace;
  int interactions = 0;
  std::vector<QueryRecord> history;
};

/// Audit, then questions and auto-resolution until nothing is open, against a backend.
RunResult run_iterative(const Dataset& data, const Config& config, OracleBackend& backend,
                        const QuestionTemplates& templates = QuestionTemplates::defaults());

/// One meta-hub query (k from the backend) then one node-children query per returned hub,
/// with no data and no auto-resolution. With `truth`, throws CertdagError("IMPERFECT_ORACLE")
/// when a ground-truth edge is missing from the result.
RunResult run_pure_metahub(int vertices, OracleBackend& backend,
                           const std::optional<std::vector<DirectedEdge>>& truth = std::nullopt,
                           const std::vector<std::string>& names = {});

/// Oracle answers recorded in a trace, as a script.
ScriptedBackend script_from_trace(const Trace& trace);

/// Re-executes the run recorded in `trace` (answers taken from its ANSWER events) and
/// checks every regenerated event against the recorded one. Throws
/// CertdagError("TRACE_MISMATCH") at the first divergence. Returns the final graph.
PartialDag replay(const Trace& trace, const Dataset& data, const Config& config,
                  const QuestionTemplates& templates = QuestionTemplates::defaults());

}  // namespace certdag::oracle
