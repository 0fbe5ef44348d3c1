#include "certdag/oracle/oracle.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "certdag/core/csv.hpp"

namespace certdag::oracle {

using nlohmann::json;

std::string_view to_string(QueryKind k) {
  switch (k) {
    case QueryKind::PerEdge: return "PER_EDGE";
    case QueryKind::MetaHub: return "META_HUB";
    case QueryKind::NodeChildren: return "NODE_CHILDREN";
  }
  return "?";
}

std::optional<QueryKind> query_kind_from_string(std::string_view s) {
  for (QueryKind k : {QueryKind::PerEdge, QueryKind::MetaHub, QueryKind::NodeChildren})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

std::string_view to_string(EdgeAnswer a) {
  switch (a) {
    case EdgeAnswer::Fwd: return "FWD";
    case EdgeAnswer::Bwd: return "BWD";
    case EdgeAnswer::Absent: return "ABSENT";
    case EdgeAnswer::Unknown: return "UNKNOWN";
  }
  return "?";
}

std::optional<EdgeAnswer> edge_answer_from_string(std::string_view s) {
  for (EdgeAnswer a : {EdgeAnswer::Fwd, EdgeAnswer::Bwd, EdgeAnswer::Absent, EdgeAnswer::Unknown})
    if (to_string(a) == s) return a;
  return std::nullopt;
}

json OracleQuery::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  if (edge) j["edge"] = {edge->i, edge->j};
  if (node) j["node"] = *node;
  if (k) j["k"] = *k;
  j["question_text"] = question_text;
  j["mechanism"] = to_string(mechanism);
  if (certificate) j["certificate"] = to_string(*certificate);
  j["info_value"] = info_value;
  return j;
}

json OracleAnswer::to_json() const {
  json j;
  j["kind"] = to_string(kind);
  switch (kind) {
    case QueryKind::PerEdge: j["answer"] = to_string(edge); break;
    case QueryKind::MetaHub:
      j["hubs"] = nodes;
      j["complete"] = complete;
      break;
    case QueryKind::NodeChildren: j["children"] = nodes; break;
  }
  return j;
}

OracleAnswer OracleAnswer::from_json(const json& j) {
  auto bad = [](const std::string& m) { return CertdagError("INVALID_ANSWER", m); };
  if (!j.is_object() || !j.contains("kind") || !j["kind"].is_string()) throw bad("answer needs a kind");
  auto kind = query_kind_from_string(j["kind"].get<std::string>());
  if (!kind) throw bad("unknown answer kind");
  try {
    switch (*kind) {
      case QueryKind::PerEdge: {
        auto a = edge_answer_from_string(j.at("answer").get<std::string>());
        if (!a) throw bad("answer must be FWD, BWD, ABSENT or UNKNOWN");
        return per_edge(*a);
      }
      case QueryKind::MetaHub: return hubs(j.at("hubs").get<std::vector<int>>(), j.value("complete", false));
      case QueryKind::NodeChildren: return children(j.at("children").get<std::vector<int>>());
    }
  } catch (const json::exception& e) {
    throw bad(std::string("malformed answer: ") + e.what());
  }
  throw bad("unreachable");
}

void check_answer(const OracleQuery& q, const OracleAnswer& a, int vertices) {
  auto bad = [](const std::string& m) { throw CertdagError("INVALID_ANSWER", m); };
  if (a.kind != q.kind) bad("answer kind does not match the query");
  std::set<int> seen;
  for (int v : a.nodes) {
    if (v < 0 || v >= vertices) bad("node index out of range");
    if (!seen.insert(v).second) bad("repeated node in answer");
  }
  if (q.kind == QueryKind::MetaHub && q.k && static_cast<int>(a.nodes.size()) != *q.k)
    bad("meta-hub answer must list exactly k nodes");
  if (q.kind == QueryKind::NodeChildren && seen.count(*q.node)) bad("a node cannot be its own child");
}

GroundTruthBackend::GroundTruthBackend(int vertices, std::vector<DirectedEdge> edges)
    : n_(vertices), edges_(std::move(edges)), children_(static_cast<std::size_t>(vertices)) {
  for (auto [a, b] : edges_) {
    if (a < 0 || b < 0 || a >= n_ || b >= n_ || a == b) throw CertdagError("MALFORMED_GT", "edge out of range");
    children_[static_cast<std::size_t>(a)].push_back(b);
  }
  for (auto& c : children_) std::sort(c.begin(), c.end());
  if (!is_acyclic(n_, edges_)) throw CertdagError("MALFORMED_GT", "ground truth has a directed cycle");
}

std::optional<int> GroundTruthBackend::known_k() const { return nonleaf_count(n_, edges_); }

std::vector<int> GroundTruthBackend::top_hubs(int k) const {
  std::vector<int> order(static_cast<std::size_t>(n_));
  for (int v = 0; v < n_; ++v) order[static_cast<std::size_t>(v)] = v;
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return children_[static_cast<std::size_t>(a)].size() > children_[static_cast<std::size_t>(b)].size();
  });
  order.resize(static_cast<std::size_t>(std::clamp(k, 0, n_)));
  return order;
}

OracleAnswer GroundTruthBackend::answer(const OracleQuery& q) {
  switch (q.kind) {
    case QueryKind::PerEdge: {
      const Pair p = *q.edge;
      for (auto [a, b] : edges_) {
        if (a == p.i && b == p.j) return OracleAnswer::per_edge(EdgeAnswer::Fwd);
        if (a == p.j && b == p.i) return OracleAnswer::per_edge(EdgeAnswer::Bwd);
      }
      return OracleAnswer::per_edge(EdgeAnswer::Absent);
    }
    case QueryKind::MetaHub: {
      auto h = top_hubs(q.k.value_or(0));
      std::set<int> in(h.begin(), h.end());
      bool complete = true;
      for (int v = 0; v < n_; ++v)
        if (!in.count(v) && !children_[static_cast<std::size_t>(v)].empty()) complete = false;
      return OracleAnswer::hubs(std::move(h), complete);
    }
    case QueryKind::NodeChildren: return OracleAnswer::children(children_[static_cast<std::size_t>(*q.node)]);
  }
  throw CertdagError("INVALID_QUERY", "unknown query kind");
}

namespace {

std::vector<int> parse_nodes(const std::string& s, bool& complete) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string tok;
  complete = false;
  while (in >> tok) {
    if (tok == "*") {
      complete = true;
      continue;
    }
    try {
      out.push_back(std::stoi(tok));
    } catch (const std::exception&) {
      throw CertdagError("MALFORMED_CSV", "bad node id in script: " + tok);
    }
  }
  return out;
}

int parse_int(const std::string& s) {
  try {
    return std::stoi(s);
  } catch (const std::exception&) {
    throw CertdagError("MALFORMED_CSV", "bad integer in script: " + s);
  }
}

}  // namespace

ScriptedBackend ScriptedBackend::from_csv_text(const std::string& text) {
  auto rows = csv::parse(text);
  std::vector<Entry> entries;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (r == 0 && !row.empty() && row[0] == "query_kind") continue;
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != 5) throw CertdagError("MALFORMED_CSV", "script rows need 5 columns");
    auto kind = query_kind_from_string(row[0]);
    if (!kind) throw CertdagError("MALFORMED_CSV", "unknown query kind " + row[0]);
    Entry e;
    e.query.kind = *kind;
    bool complete = false;
    switch (*kind) {
      case QueryKind::PerEdge: {
        e.query.edge = Pair::of(parse_int(row[1]), parse_int(row[2]));
        auto a = edge_answer_from_string(row[4]);
        if (!a) throw CertdagError("MALFORMED_CSV", "unknown per-edge answer " + row[4]);
        e.answer = OracleAnswer::per_edge(*a);
        break;
      }
      case QueryKind::MetaHub: {
        auto nodes = parse_nodes(row[4], complete);
        e.answer = OracleAnswer::hubs(std::move(nodes), complete);
        break;
      }
      case QueryKind::NodeChildren:
        e.query.node = parse_int(row[3]);
        e.answer = OracleAnswer::children(parse_nodes(row[4], complete));
        break;
    }
    entries.push_back(std::move(e));
  }
  return ScriptedBackend(std::move(entries));
}

ScriptedBackend ScriptedBackend::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CertdagError("MALFORMED_CSV", "cannot open script " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_csv_text(ss.str());
}

std::string ScriptedBackend::to_csv() const {
  std::ostringstream out;
  out << "query_kind,edge_i,edge_j,node,answer\n";
  for (const auto& e : entries_) {
    csv::Row row{std::string(to_string(e.query.kind)), "", "", "", ""};
    if (e.query.edge) row[1] = std::to_string(e.query.edge->i), row[2] = std::to_string(e.query.edge->j);
    if (e.query.node) row[3] = std::to_string(*e.query.node);
    if (e.query.kind == QueryKind::PerEdge) {
      row[4] = to_string(e.answer.edge);
    } else {
      std::string s;
      for (int v : e.answer.nodes) s += (s.empty() ? "" : " ") + std::to_string(v);
      if (e.answer.complete) s += s.empty() ? "*" : " *";
      row[4] = s;
    }
    csv::write_row(out, row);
  }
  return out.str();
}

OracleAnswer ScriptedBackend::answer(const OracleQuery& q) {
  if (next_ >= entries_.size()) throw CertdagError("SCRIPT_MISMATCH", "script exhausted");
  const Entry& e = entries_[next_];
  if (e.query.kind != q.kind || (q.kind == QueryKind::PerEdge && e.query.edge != q.edge) ||
      (q.kind == QueryKind::NodeChildren && e.query.node != q.node))
    throw CertdagError("SCRIPT_MISMATCH", "script entry " + std::to_string(next_) + " does not match the query");
  ++next_;
  return e.answer;
}

std::vector<std::string> edge_list_names(const std::string& text) {
  std::vector<std::string> names;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string a;
    while (ls >> a)
      if (std::find(names.begin(), names.end(), a) == names.end()) names.push_back(a);
  }
  return names;
}

std::vector<DirectedEdge> parse_edge_list(const std::string& text, const std::vector<std::string>& names) {
  std::vector<DirectedEdge> edges;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto index = [&](const std::string& s) {
    auto it = std::find(names.begin(), names.end(), s);
    if (it == names.end()) throw CertdagError("MALFORMED_GT", "unknown variable '" + s + "' on line " + std::to_string(lineno));
    return static_cast<int>(it - names.begin());
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    std::istringstream ls(line);
    std::string a, b, extra;
    if (!(ls >> a)) continue;
    if (!(ls >> b) || (ls >> extra)) throw CertdagError("MALFORMED_GT", "line " + std::to_string(lineno) + " needs 'parent child'");
    DirectedEdge e{index(a), index(b)};
    if (e.first == e.second) throw CertdagError("MALFORMED_GT", "self loop on line " + std::to_string(lineno));
    if (std::find(edges.begin(), edges.end(), e) == edges.end()) edges.push_back(e);
  }
  return edges;
}

std::vector<DirectedEdge> read_edge_list(const std::string& path, const std::vector<std::string>& names) {
  std::ifstream in(path);
  if (!in) throw CertdagError("MALFORMED_GT", "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_edge_list(ss.str(), names);
}

int nonleaf_count(int vertices, const std::vector<DirectedEdge>& edges) {
  std::vector<char> has(static_cast<std::size_t>(vertices), 0);
  for (auto [a, b] : edges) has[static_cast<std::size_t>(a)] = 1;
  return static_cast<int>(std::count(has.begin(), has.end(), 1));
}

}  // namespace certdag::oracle
