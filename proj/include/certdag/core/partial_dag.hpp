#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "certdag/core/types.hpp"

namespace certdag {

/// Absent: never entered the skeleton (or excluded by M1).
enum class PairState : std::uint8_t { Absent, Open, Committed, Dropped };

using DirectedEdge = std::pair<int, int>;  // (parent, child)

/// The growing committed graph. Every unordered pair is in exactly one state, so the
/// committed / dropped / open sets are disjoint by construction. Commits that would
/// close a directed cycle are refused, keeping the committed part acyclic.
class PartialDag {
 public:
  PartialDag() = default;
  /// All pairs start OPEN.
  explicit PartialDag(int vertices);

  int vertices() const { return n_; }

  PairState state(Pair p) const { return slot(p).state; }
  bool is_open(Pair p) const { return state(p) == PairState::Open; }
  std::optional<Direction> direction(Pair p) const;
  bool has_edge(int from, int to) const;
  /// Committed or open.
  bool adjacent(int a, int b) const;

  /// OPEN -> committed. Returns false (and leaves the pair OPEN) when the orientation
  /// would close a directed cycle.
  bool commit(Pair p, Direction d);
  void drop(Pair p);      // OPEN -> Dropped
  void exclude(Pair p);   // OPEN -> Absent
  void demote(Pair p);    // committed -> OPEN
  void reinstate(Pair p); // Absent -> OPEN (missing-edge recovery)
  /// Marks one orientation of an OPEN pair as ruled out (node-children answers).
  void forbid(Pair p, Direction d);
  bool allowed(Pair p, Direction d) const;

  bool would_create_cycle(int from, int to) const { return from == to || has_directed_path(to, from); }
  bool has_directed_path(int from, int to) const;

  std::vector<int> parents(int v) const;
  std::vector<int> children(int v) const;
  /// Open pairs in skeleton order (lexicographic by (i, j)).
  std::vector<Pair> open_pairs() const;
  std::vector<DirectedEdge> committed_edges() const;
  std::vector<Pair> dropped_pairs() const;
  std::size_t count(PairState s) const;

  bool operator==(const PartialDag&) const = default;

 private:
  struct Slot {
    PairState state = PairState::Open;
    Direction dir = Direction::Fwd;
    bool fwd_allowed = true;
    bool bwd_allowed = true;
    bool operator==(const Slot&) const = default;
  };
  std::size_t index(Pair p) const;
  const Slot& slot(Pair p) const { return slots_[index(p)]; }
  Slot& slot(Pair p) { return slots_[index(p)]; }
  void require(Pair p, PairState s, const char* op) const;

  int n_ = 0;
  std::vector<Slot> slots_;
};

/// True iff the committed edge set has no directed cycle (Kahn's algorithm, O(V + E)).
bool assert_acyclic(const PartialDag& dag);
/// Same check on an explicit edge list.
bool is_acyclic(int vertices, const std::vector<DirectedEdge>& edges);

}  // namespace certdag
