#include "certdag/service/service.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "certdag/bench/bench.hpp"

namespace certdag::service {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

Response error(int status, const std::string& code, const std::string& message) {
  return {status, {{"schema_version", kSchemaVersion}, {"error", code}, {"message", message}}};
}

int status_for(const std::string& code) {
  if (code == "SCRIPT_MISMATCH" || code == "TRACE_MISMATCH" || code == "DATASET_CHANGED") return 409;
  return 400;
}

json edge_names(const Dataset& d, Pair p) { return {d.name(p.i), d.name(p.j)}; }

int node_of(const json& v, const Dataset& data) {
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_string()) {
    const int i = data.index_of(v.get<std::string>());
    if (i >= 0) return i;
  }
  throw CertdagError("INVALID_ANSWER", "unknown node " + v.dump());
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

oracle::OracleAnswer parse_answer(const json& body, const oracle::OracleQuery& q, const Dataset& data) {
  using oracle::OracleAnswer;
  if (q.kind == oracle::QueryKind::PerEdge) {
    auto a = oracle::edge_answer_from_string(body.value("answer", std::string()));
    if (!a) throw CertdagError("INVALID_ANSWER", "answer must be FWD, BWD, ABSENT or UNKNOWN");
    return OracleAnswer::per_edge(*a);
  }
  std::vector<int> nodes;
  if (body.contains("nodes")) {
    if (!body["nodes"].is_array()) throw CertdagError("INVALID_ANSWER", "nodes must be a list");
    for (const auto& v : body["nodes"]) nodes.push_back(node_of(v, data));
  }
  if (q.kind == oracle::QueryKind::MetaHub) return OracleAnswer::hubs(nodes, body.value("complete", true));
  return OracleAnswer::children(nodes);
}

SessionService::SessionService(std::string state_dir) : state_dir_(std::move(state_dir)) {
  if (state_dir_.empty()) return;
  fs::create_directories(state_dir_);
  for (const auto& e : fs::directory_iterator(state_dir_)) {
    const auto name = e.path().filename().string();
    if (name.size() > 1 && name[0] == 's' && name.find_first_not_of("0123456789", 1) == std::string::npos)
      next_id_ = std::max<std::uint64_t>(next_id_, std::stoull(name.substr(1)) + 1);
  }
}

std::size_t SessionService::size() const {
  std::lock_guard lock(mu_);
  return sessions_.size();
}

std::shared_ptr<SessionService::Entry> SessionService::find(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::shared_ptr<SessionService::Entry> SessionService::build(const json& body, std::string& hash_out) {
  if (!body.is_object() || !body.contains("dataset") || !body["dataset"].is_string())
    throw CertdagError("CONFIG_INVALID", "body needs a dataset path");
  auto e = std::make_shared<Entry>();
  e->dataset_path = body["dataset"].get<std::string>();
  Dataset data = Dataset::from_csv(e->dataset_path);
  e->dataset_hash = data.content_hash();
  hash_out = e->dataset_hash;
  e->config = body.value("config", json::object());
  e->templates = body.value("templates", json::object());
  Config cfg = Config::from_json(e->config);
  auto templates = oracle::QuestionTemplates::from_json(e->templates);
  std::optional<int> k;
  if (body.contains("gt") && body["gt"].is_string()) {
    e->gt_path = body["gt"].get<std::string>();
    e->gt = oracle::read_edge_list(e->gt_path, data.names());
    k = oracle::nonleaf_count(data.vars(), *e->gt);
  }
  e->session = std::make_unique<oracle::Session>(std::move(data), cfg, templates, k);
  return e;
}

Response SessionService::create(const json& body) {
  std::shared_ptr<Entry> e;
  try {
    std::string hash;
    e = build(body, hash);
  } catch (const CertdagError& err) {
    return error(status_for(err.code()), err.code(), err.what());
  } catch (const std::exception& err) {
    return error(400, "CONFIG_INVALID", err.what());
  }
  std::string id;
  {
    std::lock_guard lock(mu_);
    id = "s" + std::to_string(next_id_++);
    sessions_[id] = e;
  }
  std::lock_guard lock(e->mu);
  persist(id, *e);
  return {201, {{"schema_version", kSchemaVersion}, {"session", id}, {"dataset_hash", e->dataset_hash}}};
}

void SessionService::persist(const std::string& id, Entry& e) const {
  if (state_dir_.empty()) return;
  const fs::path dir = fs::path(state_dir_) / id;
  fs::create_directories(dir);
  json meta{{"schema_version", kSchemaVersion}, {"dataset", e.dataset_path}, {"dataset_hash", e.dataset_hash},
            {"config", e.config}, {"templates", e.templates}};
  if (!e.gt_path.empty()) meta["gt"] = e.gt_path;
  std::ofstream(dir / "session.json") << meta.dump(2) << '\n';
  std::ofstream(dir / "trace.csv") << e.session->trace().to_csv();
}

json SessionService::question_json(Entry& e) const {
  auto& s = *e.session;
  auto q = s.next_query();
  json j{{"schema_version", kSchemaVersion}, {"status", to_string(s.status())}, {"dag", s.dag_json()}};
  if (!q) return j;
  const auto& data = s.data();
  j["query_id"] = s.interactions() + 1;
  j["kind"] = to_string(q->kind);
  j["question_text"] = q->question_text;
  j["info_value"] = q->info_value;
  j["mechanism"] = to_string(q->mechanism);
  j["certificate"] = q->certificate ? json(to_string(*q->certificate)) : json(nullptr);
  j["edge"] = q->edge ? edge_names(data, *q->edge) : json(nullptr);
  if (q->node) j["node"] = data.name(*q->node);
  if (q->k) j["k"] = *q->k;
  return j;
}

Response SessionService::next(const std::string& id) {
  auto e = find(id);
  if (!e) return error(404, "UNKNOWN_SESSION", "no session " + id);
  std::lock_guard lock(e->mu);
  try {
    auto j = question_json(*e);
    j["session"] = id;
    persist(id, *e);
    return {200, j};
  } catch (const CertdagError& err) {
    return error(status_for(err.code()), err.code(), err.what());
  }
}

Response SessionService::answer(const std::string& id, const json& body) {
  auto e = find(id);
  if (!e) return error(404, "UNKNOWN_SESSION", "no session " + id);
  std::lock_guard lock(e->mu);
  auto& s = *e->session;
  const auto& pending = s.pending();
  if (!pending || !body.is_object() || !body.contains("query_id") || !body["query_id"].is_number_integer() ||
      body["query_id"].get<int>() != s.interactions() + 1)
    return error(409, "STALE_QUERY", "answer does not reference the pending question");
  try {
    auto a = parse_answer(body, *pending, s.data());
    auto out = s.answer(a);
    json commits = json::array();
    for (const auto& c : out.report.new_commits) {
      const auto from = parent_of(c.pair, c.direction), to = child_of(c.pair, c.direction);
      commits.push_back({{"edge", {s.data().name(from), s.data().name(to)}}, {"rule", propagation::to_string(c.rule)}});
    }
    json drops = json::array();
    for (Pair p : out.report.drops) drops.push_back(edge_names(s.data(), p));
    persist(id, *e);
    return {200,
            {{"schema_version", kSchemaVersion},
             {"session", id},
             {"inconsistent", out.inconsistent},
             {"message", out.message},
             {"propagation", {{"commits", commits}, {"drops", drops}, {"resolved", out.report.resolved()}}},
             {"dag", s.dag_json()}}};
  } catch (const CertdagError& err) {
    return error(status_for(err.code()), err.code(), err.what());
  }
}

Response SessionService::trace(const std::string& id) {
  auto e = find(id);
  if (!e) return error(404, "UNKNOWN_SESSION", "no session " + id);
  std::lock_guard lock(e->mu);
  const auto& t = e->session->trace();
  return {200, {{"schema_version", kSchemaVersion}, {"session", id}, {"events", t.to_json()}, {"csv", t.to_csv()}}};
}

Response SessionService::metrics(const std::string& id) {
  auto e = find(id);
  if (!e) return error(404, "UNKNOWN_SESSION", "no session " + id);
  std::lock_guard lock(e->mu);
  const auto& s = *e->session;
  json j{{"schema_version", kSchemaVersion},
         {"session", id},
         {"status", to_string(s.status())},
         {"interactions", s.interactions()},
         {"bits", s.trace().total_bits()},
         {"committed", s.dag().count(PairState::Committed)},
         {"open", s.dag().count(PairState::Open)},
         {"dropped", s.dag().count(PairState::Dropped)}};
  if (e->gt) j["eval"] = bench::evaluate(s.dag(), *e->gt, s.trace()).to_json();
  return {200, j};
}

Response SessionService::resume(const std::string& id) {
  if (state_dir_.empty()) return error(404, "UNKNOWN_SESSION", "service has no state directory");
  const fs::path dir = fs::path(state_dir_) / id;
  if (!fs::exists(dir / "session.json")) return error(404, "UNKNOWN_SESSION", "no persisted session " + id);
  try {
    auto meta = json::parse(read_file(dir / "session.json"));
    json body{{"dataset", meta.at("dataset")}, {"config", meta.at("config")}, {"templates", meta.at("templates")}};
    if (meta.contains("gt")) body["gt"] = meta["gt"];
    std::string hash;
    auto e = build(body, hash);
    if (hash != meta.at("dataset_hash").get<std::string>())
      throw CertdagError("DATASET_CHANGED", "dataset content differs from the persisted hash");
    auto recorded = Trace::from_csv_text(read_file(dir / "trace.csv"));
    auto script = oracle::script_from_trace(recorded);
    auto& s = *e->session;
    while (!script.exhausted()) {
      auto q = s.next_query();
      if (!q) throw CertdagError("TRACE_MISMATCH", "session finished before the recorded answers ran out");
      s.answer(script.answer(*q));
    }
    s.audit();
    const auto& got = s.trace().events();
    const auto& want = recorded.events();
    if (got.size() > want.size() || !std::equal(got.begin(), got.end(), want.begin()))
      throw CertdagError("TRACE_MISMATCH", "replayed session diverges from the persisted trace");
    {
      std::lock_guard lock(mu_);
      sessions_[id] = e;
    }
    std::lock_guard lock(e->mu);
    auto j = question_json(*e);
    j["session"] = id;
    j["resumed_interactions"] = s.interactions();
    return {200, j};
  } catch (const CertdagError& err) {
    return error(status_for(err.code()), err.code(), err.what());
  } catch (const json::exception& err) {
    return error(400, "MALFORMED_STATE", err.what());
  }
}

}  // namespace certdag::service
