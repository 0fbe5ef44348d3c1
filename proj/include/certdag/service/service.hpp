#pragma once

#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "certdag/oracle/session.hpp"

namespace certdag::service {

inline constexpr int kSchemaVersion = 1;

/// Status code plus JSON body, independent of the HTTP transport.
struct Response {
  int status = 200;
  nlohmann::json body;
};

/// Live oracle sessions keyed by an opaque id. Each session is persisted as
/// (config, dataset path and hash, trace) under `state_dir` when one is given; the
/// trace is the single source of truth and resume replays its answers.
class SessionService {
 public:
  explicit SessionService(std::string state_dir = {});

  /// Body: {"dataset": path, "config": {...}?, "gt": path?, "templates": {...}?}.
  Response create(const nlohmann::json& body);
  /// Pending question with the dag snapshot, or {"status": "DONE"}.
  Response next(const std::string& id);
  /// Body: {"query_id": n, "answer": "FWD" | ..., "nodes": [...]?}. 409 when query_id is
  /// not the pending one.
  Response answer(const std::string& id, const nlohmann::json& body);
  Response trace(const std::string& id);
  Response metrics(const std::string& id);
  /// Reloads a persisted session from state_dir.
  Response resume(const std::string& id);

  std::size_t size() const;

 private:
  struct Entry {
    std::unique_ptr<oracle::Session> session;
    std::optional<std::vector<DirectedEdge>> gt;
    std::string dataset_path;
    std::string gt_path;
    std::string dataset_hash;
    nlohmann::json config;
    nlohmann::json templates;
    std::mutex mu;
  };
  std::shared_ptr<Entry> find(const std::string& id);
  std::shared_ptr<Entry> build(const nlohmann::json& body, std::string& hash_out);
  void persist(const std::string& id, Entry& e) const;
  nlohmann::json question_json(Entry& e) const;

  std::string state_dir_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  std::uint64_t next_id_ = 1;
};

/// Parses an answer payload against the pending query; names may be used for nodes.
oracle::OracleAnswer parse_answer(const nlohmann::json& body, const oracle::OracleQuery& q, const Dataset& data);

/// Blocks serving the HTTP API on `host:port`:
///   POST /sessions, GET /sessions/{id}/question, POST /sessions/{id}/answer,
///   GET /sessions/{id}/trace, GET /sessions/{id}/metrics, POST /sessions/{id}/resume.
void serve(SessionService& svc, const std::string& host, int port);

}  // namespace certdag::service
