#pragma once
// Independent closure used to check propagation: plain adjacency matrices, naive
// reachability, every ordered (x, y) candidate rechecked from scratch each pass.

#include <random>
#include <vector>

#include "certdag/core/partial_dag.hpp"

namespace certdag::testing {

struct MatrixGraph {
  int n = 0;
  std::vector<std::vector<int>> dir;   // dir[a][b] = 1 iff a -> b committed
  std::vector<std::vector<int>> und;   // und[a][b] = und[b][a] = 1 iff open

  explicit MatrixGraph(int v) : n(v), dir(v, std::vector<int>(v, 0)), und(v, std::vector<int>(v, 0)) {}

  bool adj(int a, int b) const { return dir[a][b] || dir[b][a] || und[a][b]; }

  bool reach(int from, int to) const {
    std::vector<int> seen(n, 0), stack{from};
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v == to) return true;
      if (seen[v]) continue;
      seen[v] = 1;
      for (int w = 0; w < n; ++w)
        if (dir[v][w]) stack.push_back(w);
    }
    return false;
  }

  bool forced(int x, int y) const {
    if (reach(y, x)) return false;
    if (reach(x, y) && x != y) {
      // x reaches y only through committed edges; orienting y -> x would close a cycle.
      return true;
    }
    for (int a = 0; a < n; ++a)
      if (a != x && a != y && dir[a][x] && !adj(a, y)) return true;  // R1
    for (int c = 0; c < n; ++c)
      for (int d = 0; d < n; ++d)
        if (c != d && c != x && d != x && c != y && d != y && dir[c][y] && dir[d][y] && und[x][c] && und[x][d] &&
            !adj(c, d))
          return true;  // R3
    return false;
  }

  void close() {
    for (bool changed = true; changed;) {
      changed = false;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y)
          if (x != y && und[x][y] && forced(x, y)) {
            und[x][y] = und[y][x] = 0;
            dir[x][y] = 1;
            changed = true;
          }
    }
  }
};

inline MatrixGraph to_matrix(const PartialDag& g) {
  MatrixGraph m(g.vertices());
  for (auto [a, b] : g.committed_edges()) m.dir[a][b] = 1;
  for (Pair p : g.open_pairs()) m.und[p.i][p.j] = m.und[p.j][p.i] = 1;
  return m;
}

/// Random DAG (upper-triangular in a shuffled order) with every v-structure edge
/// committed, a random subset of the remaining edges committed and the rest open.
/// Non-adjacent pairs are excluded. Returns the DAG edges alongside the partial graph.
struct RandomPartial {
  PartialDag dag;
  std::vector<std::vector<int>> truth;  // truth[a][b] = 1 iff a -> b in the generating DAG
};

inline RandomPartial random_partial(int n, double edge_p, double commit_p, std::mt19937_64& rng) {
  std::vector<int> order(n);
  for (int k = 0; k < n; ++k) order[k] = k;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution edge(edge_p), commit(commit_p);
  RandomPartial r{PartialDag(n), std::vector<std::vector<int>>(n, std::vector<int>(n, 0))};
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (edge(rng)) r.truth[order[a]][order[b]] = 1;
  auto adjacent = [&](int a, int b) { return r.truth[a][b] || r.truth[b][a]; };
  std::vector<std::vector<int>> in_v(n, std::vector<int>(n, 0));
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (r.truth[a][c] && r.truth[b][c] && !adjacent(a, b)) in_v[a][c] = in_v[b][c] = 1;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      Pair p{a, b};
      if (!adjacent(a, b)) {
        r.dag.exclude(p);
        continue;
      }
      const int from = r.truth[a][b] ? a : b, to = r.truth[a][b] ? b : a;
      if (in_v[from][to] || commit(rng)) r.dag.commit(p, from == a ? Direction::Fwd : Direction::Bwd);
    }
  return r;
}

}  // namespace certdag::testing
