#include "certdag/core/partial_dag.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace certdag {

PartialDag::PartialDag(int vertices)
    : n_(vertices), slots_(static_cast<std::size_t>(vertices) * static_cast<std::size_t>(std::max(vertices - 1, 0)) / 2) {}

std::size_t PartialDag::index(Pair p) const {
  if (p.i < 0 || p.j >= n_ || p.i >= p.j) throw std::out_of_range("pair out of range");
  // Row-major upper triangle.
  auto i = static_cast<std::size_t>(p.i), j = static_cast<std::size_t>(p.j), n = static_cast<std::size_t>(n_);
  return i * (2 * n - i - 1) / 2 + (j - i - 1);
}

void PartialDag::require(Pair p, PairState s, const char* op) const {
  if (state(p) != s)
    throw std::logic_error(std::string(op) + ": pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                           ") is in the wrong state");
}

std::optional<Direction> PartialDag::direction(Pair p) const {
  const Slot& s = slot(p);
  if (s.state != PairState::Committed) return std::nullopt;
  return s.dir;
}

bool PartialDag::has_edge(int from, int to) const {
  if (from == to) return false;
  Pair p = Pair::of(from, to);
  auto d = direction(p);
  return d && *d == direction_from(p, from);
}

bool PartialDag::adjacent(int a, int b) const {
  if (a == b) return false;
  PairState s = state(Pair::of(a, b));
  return s == PairState::Open || s == PairState::Committed;
}

bool PartialDag::commit(Pair p, Direction d) {
  require(p, PairState::Open, "commit");
  if (would_create_cycle(parent_of(p, d), child_of(p, d))) return false;
  Slot& s = slot(p);
  s.state = PairState::Committed;
  s.dir = d;
  return true;
}

void PartialDag::drop(Pair p) {
  require(p, PairState::Open, "drop");
  slot(p).state = PairState::Dropped;
}

void PartialDag::exclude(Pair p) {
  require(p, PairState::Open, "exclude");
  slot(p).state = PairState::Absent;
}

void PartialDag::reinstate(Pair p) {
  require(p, PairState::Absent, "reinstate");
  slot(p) = Slot{};
}

void PartialDag::demote(Pair p) {
  require(p, PairState::Committed, "demote");
  slot(p) = Slot{};
}

void PartialDag::forbid(Pair p, Direction d) {
  require(p, PairState::Open, "forbid");
  (d == Direction::Fwd ? slot(p).fwd_allowed : slot(p).bwd_allowed) = false;
}

bool PartialDag::allowed(Pair p, Direction d) const {
  const Slot& s = slot(p);
  return d == Direction::Fwd ? s.fwd_allowed : s.bwd_allowed;
}

bool PartialDag::has_directed_path(int from, int to) const {
  if (from == to) return true;
  std::vector<char> seen(static_cast<std::size_t>(n_), 0);
  std::vector<int> stack{from};
  seen[static_cast<std::size_t>(from)] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int w = 0; w < n_; ++w) {
      if (w == u || seen[static_cast<std::size_t>(w)] || !has_edge(u, w)) continue;
      if (w == to) return true;
      seen[static_cast<std::size_t>(w)] = 1;
      stack.push_back(w);
    }
  }
  return false;
}

std::vector<int> PartialDag::parents(int v) const {
  std::vector<int> out;
  for (int u = 0; u < n_; ++u)
    if (has_edge(u, v)) out.push_back(u);
  return out;
}

std::vector<int> PartialDag::children(int v) const {
  std::vector<int> out;
  for (int u = 0; u < n_; ++u)
    if (has_edge(v, u)) out.push_back(u);
  return out;
}

std::vector<Pair> PartialDag::open_pairs() const {
  std::vector<Pair> out;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (is_open({i, j})) out.push_back({i, j});
  return out;
}

std::vector<DirectedEdge> PartialDag::committed_edges() const {
  std::vector<DirectedEdge> out;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (auto d = direction({i, j})) out.emplace_back(parent_of({i, j}, *d), child_of({i, j}, *d));
  return out;
}

std::vector<Pair> PartialDag::dropped_pairs() const {
  std::vector<Pair> out;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (state({i, j}) == PairState::Dropped) out.push_back({i, j});
  return out;
}

std::size_t PartialDag::count(PairState s) const {
  std::size_t c = 0;
  for (const Slot& slot : slots_) c += slot.state == s;
  return c;
}

bool is_acyclic(int vertices, const std::vector<DirectedEdge>& edges) {
  std::vector<int> indeg(static_cast<std::size_t>(vertices), 0);
  std::vector<std::vector<int>> out(static_cast<std::size_t>(vertices));
  for (auto [a, b] : edges) {
    out[static_cast<std::size_t>(a)].push_back(b);
    ++indeg[static_cast<std::size_t>(b)];
  }
  std::vector<int> queue;
  for (int v = 0; v < vertices; ++v)
    if (indeg[static_cast<std::size_t>(v)] == 0) queue.push_back(v);
  std::size_t seen = 0;
  while (seen < queue.size()) {
    int u = queue[seen++];
    for (int w : out[static_cast<std::size_t>(u)])
      if (--indeg[static_cast<std::size_t>(w)] == 0) queue.push_back(w);
  }
  return seen == static_cast<std::size_t>(vertices);
}

bool assert_acyclic(const PartialDag& dag) { return is_acyclic(dag.vertices(), dag.committed_edges()); }

}  // namespace certdag
