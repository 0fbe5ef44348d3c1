#include "certdag/core/trace.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "certdag/core/csv.hpp"

namespace certdag {

namespace {

constexpr std::array<std::string_view, 7> kActionNames{"COMMIT_FWD", "COMMIT_BWD", "DROP", "DEMOTE",
                                                       "ABSTAIN",    "QUERY",      "ANSWER"};

int parse_int(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw CertdagError("MALFORMED_TRACE", std::string("bad ") + what + ": '" + s + "'");
  }
}

}  // namespace

std::string_view to_string(Action a) { return kActionNames[static_cast<std::size_t>(a)]; }

std::optional<Action> action_from_string(std::string_view s) {
  for (std::size_t k = 0; k < kActionNames.size(); ++k)
    if (kActionNames[k] == s) return static_cast<Action>(k);
  return std::nullopt;
}

std::string format_bits(double bits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", bits);
  return buf;
}

double Trace::total_bits() const {
  double b = 0.0;
  for (const auto& e : events_) b += e.bits;
  return b;
}

void Trace::write_csv(std::ostream& out) const {
  csv::write_row(out, {"round", "mechanism", "edge_i", "edge_j", "action", "detail", "bits"});
  for (const auto& e : events_) {
    csv::write_row(out, {std::to_string(e.round), std::string(to_string(e.mechanism)),
                         e.edge ? std::to_string(e.edge->i) : "", e.edge ? std::to_string(e.edge->j) : "",
                         std::string(to_string(e.action)), e.detail, format_bits(e.bits)});
  }
}

std::string Trace::to_csv() const {
  std::ostringstream ss;
  write_csv(ss);
  return ss.str();
}

Trace Trace::from_csv_text(const std::string& text) {
  Trace t;
  auto rows = csv::parse(text);
  if (rows.empty()) return t;
  const csv::Row expected{"round", "mechanism", "edge_i", "edge_j", "action", "detail", "bits"};
  if (rows.front() != expected) throw CertdagError("MALFORMED_TRACE", "unexpected trace header");
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != expected.size()) throw CertdagError("MALFORMED_TRACE", "wrong field count in trace row");
    TraceEvent e;
    e.round = parse_int(row[0], "round");
    auto m = mechanism_from_string(row[1]);
    auto a = action_from_string(row[4]);
    if (!m || !a) throw CertdagError("MALFORMED_TRACE", "unknown mechanism or action in trace row");
    e.mechanism = *m;
    e.action = *a;
    if (!row[2].empty() || !row[3].empty()) e.edge = Pair::of(parse_int(row[2], "edge_i"), parse_int(row[3], "edge_j"));
    e.detail = row[5];
    e.bits = std::stod(row[6]);
    t.append(std::move(e));
  }
  return t;
}

Trace Trace::read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CertdagError("MALFORMED_TRACE", "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_csv_text(ss.str());
}

nlohmann::json event_to_json(const TraceEvent& e) {
  nlohmann::json j{{"round", e.round},
                   {"mechanism", to_string(e.mechanism)},
                   {"action", to_string(e.action)},
                   {"detail", e.detail},
                   {"bits", e.bits}};
  j["edge"] = e.edge ? nlohmann::json::array({e.edge->i, e.edge->j}) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json Trace::to_json() const {
  auto arr = nlohmann::json::array();
  for (const auto& e : events_) arr.push_back(event_to_json(e));
  return arr;
}

void apply_event(PartialDag& dag, const TraceEvent& e) {
  switch (e.action) {
    case Action::CommitFwd:
    case Action::CommitBwd: {
      Direction d = e.action == Action::CommitFwd ? Direction::Fwd : Direction::Bwd;
      if (!dag.commit(*e.edge, d)) throw CertdagError("TRACE_MISMATCH", "trace commit closes a cycle");
      break;
    }
    case Action::Drop:
      if (e.mechanism == Mechanism::M1)
        dag.exclude(*e.edge);
      else
        dag.drop(*e.edge);
      break;
    case Action::Demote:
      dag.demote(*e.edge);
      break;
    case Action::Answer: {
      auto j = nlohmann::json::parse(e.detail, nullptr, false);
      if (j.is_discarded() || !j.contains("kind")) break;
      const std::string kind = j["kind"];
      const int n = dag.vertices();
      if (kind == "NODE_CHILDREN") {
        int v = j["node"];
        std::set<int> kids(j["children"].begin(), j["children"].end());
        for (int u = 0; u < n; ++u) {
          if (u == v || kids.count(u)) continue;
          Pair p = Pair::of(v, u);
          if (dag.is_open(p)) dag.forbid(p, direction_from(p, v));
        }
      } else if (kind == "META_HUB" && j.value("complete", false)) {
        std::set<int> hubs(j["hubs"].begin(), j["hubs"].end());
        for (Pair p : dag.open_pairs()) {
          if (!hubs.count(p.i)) dag.forbid(p, Direction::Fwd);
          if (!hubs.count(p.j)) dag.forbid(p, Direction::Bwd);
        }
      }
      break;
    }
    case Action::Query:
      if (e.mechanism == Mechanism::M15 && e.edge && dag.state(*e.edge) == PairState::Absent) dag.reinstate(*e.edge);
      break;
    case Action::Abstain:
      break;
  }
}

PartialDag fold_trace(const std::vector<TraceEvent>& events, int vertices) {
  PartialDag dag(vertices);
  for (const auto& e : events) apply_event(dag, e);
  return dag;
}

}  // namespace certdag
