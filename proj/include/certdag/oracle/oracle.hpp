#pragma once

#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "certdag/core/partial_dag.hpp"
#include "certdag/core/types.hpp"

namespace certdag::oracle {

enum class QueryKind : std::uint8_t { PerEdge, MetaHub, NodeChildren };
enum class EdgeAnswer : std::uint8_t { Fwd, Bwd, Absent, Unknown };

std::string_view to_string(QueryKind k);
std::optional<QueryKind> query_kind_from_string(std::string_view s);
std::string_view to_string(EdgeAnswer a);
std::optional<EdgeAnswer> edge_answer_from_string(std::string_view s);

struct OracleQuery {
  QueryKind kind = QueryKind::PerEdge;
  std::optional<Pair> edge;  // PER_EDGE
  std::optional<int> node;   // NODE_CHILDREN
  std::optional<int> k;      // META_HUB
  std::string question_text;
  Mechanism mechanism = Mechanism::M11;  // M11, M13, M14 or M15 (recovery)
  std::optional<CertificateCode> certificate;
  double info_value = 0.0;

  nlohmann::json to_json() const;
};

struct OracleAnswer {
  QueryKind kind = QueryKind::PerEdge;
  EdgeAnswer edge = EdgeAnswer::Unknown;  // PER_EDGE
  std::vector<int> nodes;                 // META_HUB: ordered hubs; NODE_CHILDREN: children
  bool complete = false;                  // META_HUB: every node outside `nodes` is a leaf

  static OracleAnswer per_edge(EdgeAnswer a) { return {QueryKind::PerEdge, a, {}, false}; }
  static OracleAnswer hubs(std::vector<int> h, bool complete) { return {QueryKind::MetaHub, EdgeAnswer::Unknown, std::move(h), complete}; }
  static OracleAnswer children(std::vector<int> c) { return {QueryKind::NodeChildren, EdgeAnswer::Unknown, std::move(c), false}; }

  /// Compact form stored in ANSWER trace events.
  nlohmann::json to_json() const;
  static OracleAnswer from_json(const nlohmann::json& j);
};

/// Throws CertdagError("INVALID_ANSWER") when the payload does not fit the query: wrong
/// kind, META_HUB size != k or repeated nodes, NODE_CHILDREN containing the node itself.
void check_answer(const OracleQuery& q, const OracleAnswer& a, int vertices);

class OracleBackend {
 public:
  virtual ~OracleBackend() = default;
  virtual OracleAnswer answer(const OracleQuery& q) = 0;
  /// Number of non-leaf vertices when the backend knows it (sizes the meta-hub query).
  virtual std::optional<int> known_k() const { return std::nullopt; }
  virtual std::string name() const = 0;
};

/// Answers from a fixed DAG on the dataset's vertex indices.
class GroundTruthBackend : public OracleBackend {
 public:
  GroundTruthBackend(int vertices, std::vector<DirectedEdge> edges);
  OracleAnswer answer(const OracleQuery& q) override;
  std::optional<int> known_k() const override;
  std::string name() const override { return "GROUND_TRUTH"; }

  const std::vector<DirectedEdge>& edges() const { return edges_; }
  /// Top-k vertices by out-degree, ties by index.
  std::vector<int> top_hubs(int k) const;

 private:
  int n_;
  std::vector<DirectedEdge> edges_;
  std::vector<std::vector<int>> children_;
};

/// Replays recorded answers in order. Each answer must be requested by a query of the
/// same kind on the same edge / node, otherwise CertdagError("SCRIPT_MISMATCH").
class ScriptedBackend : public OracleBackend {
 public:
  struct Entry {
    OracleQuery query;  // kind and edge / node are matched
    OracleAnswer answer;
  };
  explicit ScriptedBackend(std::vector<Entry> entries, std::optional<int> k = std::nullopt)
      : entries_(std::move(entries)), k_(k) {}
  /// Columns: query_kind,edge_i,edge_j,node,answer. answer is FWD/BWD/ABSENT/UNKNOWN for
  /// PER_EDGE and a space-separated node list for META_HUB / NODE_CHILDREN (META_HUB
  /// lists may end in "*" to mark them complete).
  static ScriptedBackend from_csv(const std::string& path);
  static ScriptedBackend from_csv_text(const std::string& text);
  std::string to_csv() const;

  OracleAnswer answer(const OracleQuery& q) override;
  std::optional<int> known_k() const override { return k_; }
  std::string name() const override { return "SCRIPTED"; }
  bool exhausted() const { return next_ >= entries_.size(); }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  std::vector<Entry> entries_;
  std::size_t next_ = 0;
  std::optional<int> k_;
};

/// Delegates to a callback (console prompt or the session service).
class InteractiveBackend : public OracleBackend {
 public:
  using Handler = std::function<OracleAnswer(const OracleQuery&)>;
  explicit InteractiveBackend(Handler h, std::optional<int> k = std::nullopt) : handler_(std::move(h)), k_(k) {}
  OracleAnswer answer(const OracleQuery& q) override { return handler_(q); }
  std::optional<int> known_k() const override { return k_; }
  std::string name() const override { return "INTERACTIVE"; }

 private:
  Handler handler_;
  std::optional<int> k_;
};

/// Ground-truth edge list, one `parent child` pair of names per line; `#` comments and
/// blank lines are ignored. Throws CertdagError("MALFORMED_GT") on unknown names.
std::vector<DirectedEdge> read_edge_list(const std::string& path, const std::vector<std::string>& names);
std::vector<DirectedEdge> parse_edge_list(const std::string& text, const std::vector<std::string>& names);
/// Names appearing in an edge list, in first-appearance order.
std::vector<std::string> edge_list_names(const std::string& text);

/// Vertices with out-degree >= 1.
int nonleaf_count(int vertices, const std::vector<DirectedEdge>& edges);

}  // namespace certdag::oracle
