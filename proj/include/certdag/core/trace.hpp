#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "certdag/core/partial_dag.hpp"
#include "certdag/core/types.hpp"

namespace certdag {

enum class Action : std::uint8_t { CommitFwd, CommitBwd, Drop, Demote, Abstain, Query, Answer };

std::string_view to_string(Action a);
std::optional<Action> action_from_string(std::string_view s);

/// One append-only audit record.
struct TraceEvent {
  int round = 1;
  Mechanism mechanism = Mechanism::M1;
  std::optional<Pair> edge;
  Action action = Action::Abstain;
  std::string detail;
  double bits = 0.0;  // 1 per oracle interaction, 0 otherwise

  bool operator==(const TraceEvent&) const = default;
};

/// Exact textual form used in the CSV and JSON mirrors; comparing these strings is how
/// replay detects divergence.
std::string format_bits(double bits);

class Trace {
 public:
  void append(TraceEvent e) { events_.push_back(std::move(e)); }
  const std::vector<TraceEvent>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }
  double total_bits() const;
  int last_round() const { return events_.empty() ? 0 : events_.back().round; }

  /// Columns: round,mechanism,edge_i,edge_j,action,detail,bits
  void write_csv(std::ostream& out) const;
  std::string to_csv() const;
  static Trace from_csv_text(const std::string& text);
  static Trace read_csv(const std::string& path);

  nlohmann::json to_json() const;

 private:
  std::vector<TraceEvent> events_;
};

nlohmann::json event_to_json(const TraceEvent& e);

/// Folds the mutations recorded in a trace over an all-OPEN graph on `vertices` nodes.
/// M1 drops exclude the pair from the skeleton; other drops mark it dropped; an M15
/// query reinstates an excluded pair; DEMOTE reopens a committed pair; node-children /
/// meta-hub ANSWER events carry the orientation bans they imply.
PartialDag fold_trace(const std::vector<TraceEvent>& events, int vertices);

/// Applies a single event to `dag` (the step used by fold_trace).
void apply_event(PartialDag& dag, const TraceEvent& e);

}  // namespace certdag
