#include <doctest.h>

#include <cmath>
#include <random>

#include "certdag/propagation/propagation.hpp"
#include "meek_oracle.hpp"

using namespace certdag;
using namespace certdag::propagation;

namespace {

bool same_state(const PartialDag& dag, const testing::MatrixGraph& m) {
  for (int a = 0; a < dag.vertices(); ++a)
    for (int b = 0; b < dag.vertices(); ++b) {
      if (a == b) continue;
      if (dag.has_edge(a, b) != static_cast<bool>(m.dir[a][b])) return false;
      if (a < b && dag.is_open(Pair{a, b}) != static_cast<bool>(m.und[a][b])) return false;
    }
  return true;
}

Dataset chain_data(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(n, 3);
  for (int k = 0; k < n; ++k) {
    const double x = u(rng);
    const double y = std::tanh(2.0 * x) + 0.3 * u(rng);
    const double z = y * y + 0.3 * u(rng);
    m.row(k) << x, y, z;
  }
  return Dataset(std::move(m), {"x", "y", "z"});
}

}  // namespace

TEST_CASE("meek R1 orients the tail of a committed arrow into a non-adjacent pair") {
  PartialDag g(3);
  g.commit(Pair{0, 1}, Direction::Fwd);
  g.exclude(Pair{0, 2});
  auto r = propagate(g, nullptr, 0.0);
  CHECK(g.has_edge(1, 2));
  REQUIRE(r.new_commits.size() == 1);
  CHECK(r.new_commits[0].rule == Rule::MeekR1);
  CHECK(r.events.size() == 1);
  CHECK(r.events[0].mechanism == Mechanism::M6);
}

TEST_CASE("meek R1 does not fire when the outer pair is adjacent") {
  PartialDag g(3);
  g.commit(Pair{0, 1}, Direction::Fwd);
  auto r = propagate(g, nullptr, 0.0);
  // 0 -> 1, 0 - 2, 1 - 2 all adjacent: nothing forced.
  CHECK(r.resolved() == 0);
}

TEST_CASE("acyclicity forces the only cycle-free orientation") {
  PartialDag g(3);
  g.commit(Pair{0, 1}, Direction::Fwd);
  g.commit(Pair{1, 2}, Direction::Fwd);
  auto r = propagate(g, nullptr, 0.0);
  CHECK(g.has_edge(0, 2));
  REQUIRE(r.new_commits.size() == 1);
  CHECK(r.new_commits[0].rule == Rule::Acyclicity);
}

TEST_CASE("meek R3 orients the apex of two converging committed arrows") {
  // c=1 -> b=3 <- d=2, a=0 open to all three, 1 and 2 non-adjacent.
  PartialDag g(4);
  g.commit(Pair{1, 3}, Direction::Fwd);
  g.commit(Pair{2, 3}, Direction::Fwd);
  g.exclude(Pair{1, 2});
  auto r = propagate(g, nullptr, 0.0);
  CHECK(g.has_edge(0, 3));
  CHECK(g.is_open(Pair{0, 1}));
  CHECK(g.is_open(Pair{0, 2}));
  REQUIRE(r.new_commits.size() == 1);
  CHECK(r.new_commits[0].rule == Rule::MeekR3);
}

TEST_CASE("forbidden orientations are respected") {
  PartialDag g(3);
  g.commit(Pair{0, 1}, Direction::Fwd);
  g.exclude(Pair{0, 2});
  g.forbid(Pair{1, 2}, Direction::Fwd);
  auto r = propagate(g, nullptr, 0.0);
  CHECK(g.is_open(Pair{1, 2}));
  CHECK(r.resolved() == 0);
}

TEST_CASE("propagation matches the independent closure and is sound on random partial graphs") {
  std::mt19937_64 rng(20240);
  for (int trial = 0; trial < 300; ++trial) {
    auto rp = testing::random_partial(5 + trial % 3, 0.45, 0.3, rng);
    auto expect = testing::to_matrix(rp.dag);
    expect.close();
    PartialDag g = rp.dag;
    propagate(g, nullptr, 0.0);
    CHECK(same_state(g, expect));
    CHECK(assert_acyclic(g));
    for (auto [a, b] : g.committed_edges()) CHECK(rp.truth[a][b] == 1);
  }
}

TEST_CASE("confirm gate blocks rule commits against the bivariate evidence") {
  auto data = chain_data(600, 5);
  Config cfg;
  stats::StatsContext ctx(data, cfg);
  // Pretend z -> y was committed; R1 would then push y -> x.
  PartialDag g(3);
  g.commit(Pair{1, 2}, Direction::Bwd);
  g.exclude(Pair{0, 2});
  const double ratio = confirm_ratio(ctx, Pair{0, 1}, Direction::Bwd);
  auto gated = g;
  auto r = propagate(gated, &ctx, 1e6);
  CHECK(gated.is_open(Pair{0, 1}));
  CHECK(r.confirm_ratios.at(Pair{0, 1}) == doctest::Approx(ratio));
  auto open_gate = g;
  propagate(open_gate, &ctx, 0.0);
  CHECK(open_gate.has_edge(1, 0));
}

TEST_CASE("transitive d-separation drops the endpoints of a chain") {
  auto data = chain_data(800, 11);
  Config cfg;
  stats::StatsContext ctx(data, cfg);
  PartialDag g(3);
  g.commit(Pair{0, 1}, Direction::Fwd);
  g.commit(Pair{1, 2}, Direction::Fwd);
  auto r = transitive_dsep(g, ctx);
  CHECK(g.state(Pair{0, 2}) == PairState::Dropped);
  REQUIRE(r.events.size() == 1);
  CHECK(r.events[0].mechanism == Mechanism::M8);
  CHECK(r.events[0].action == Action::Drop);
}

TEST_CASE("auto_resolve reaches a fixpoint and is deterministic") {
  auto data = chain_data(500, 3);
  Config cfg;
  auto run = [&] {
    stats::StatsContext ctx(data, cfg);
    PartialDag g(3);
    g.commit(Pair{0, 1}, Direction::Fwd);
    auto r = auto_resolve(g, ctx);
    return std::make_pair(g, r.events);
  };
  auto [g1, e1] = run();
  auto [g2, e2] = run();
  CHECK(g1 == g2);
  CHECK(e1 == e2);
  stats::StatsContext ctx(data, cfg);
  auto again = g1;
  CHECK(auto_resolve(again, ctx).resolved() == 0);
}
