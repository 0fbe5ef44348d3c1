#include <doctest.h>

#include <random>

#include "certdag/oracle/session.hpp"

using namespace certdag;
using namespace certdag::oracle;

namespace {

const char* kAsiaEdges = R"(# asia
asia tub
smoke lung
smoke bronc
tub either
lung either
either xray
either dysp
bronc dysp
)";

std::vector<DirectedEdge> random_dag(int n, double p, std::mt19937_64& rng) {
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) order[static_cast<std::size_t>(v)] = v;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution coin(p);
  std::vector<DirectedEdge> e;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (coin(rng)) e.emplace_back(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
  return e;
}

Dataset noise_data(int vars, int rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m(rows, vars);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < vars; ++c) m(r, c) = g(rng);
  std::vector<std::string> names;
  for (int c = 0; c < vars; ++c) names.push_back("x" + std::to_string(c));
  return Dataset(std::move(m), names);
}

// Oracle-only configuration: every pair starts OPEN and only sound rules run.
Config oracle_only(OracleMode mode) {
  Config c;
  c.cascade_enabled = false;
  c.reaudit_enabled = false;
  c.transitive_dsep_enabled = false;
  c.confirm_ratio = 0.0;
  c.oracle_mode = mode;
  c.min_samples = 10;
  return c;
}

bool matches(const PartialDag& dag, const std::vector<DirectedEdge>& truth) {
  auto got = dag.committed_edges();
  auto want = truth;
  std::sort(got.begin(), got.end());
  std::sort(want.begin(), want.end());
  return got == want;
}

}  // namespace

TEST_CASE("ground-truth backend answers all three query kinds") {
  GroundTruthBackend gt(4, {{0, 1}, {0, 2}, {2, 3}});
  CHECK(gt.known_k() == 2);
  CHECK(gt.top_hubs(2) == std::vector<int>{0, 2});
  OracleQuery q;
  q.edge = Pair{1, 2};
  CHECK(gt.answer(q).edge == EdgeAnswer::Absent);
  q.edge = Pair{2, 3};
  CHECK(gt.answer(q).edge == EdgeAnswer::Fwd);
  q.edge = Pair{0, 2};
  CHECK(gt.answer(q).edge == EdgeAnswer::Fwd);
  OracleQuery hub;
  hub.kind = QueryKind::MetaHub;
  hub.k = 2;
  auto h = gt.answer(hub);
  CHECK(h.nodes == std::vector<int>{0, 2});
  CHECK(h.complete);
  OracleQuery ch;
  ch.kind = QueryKind::NodeChildren;
  ch.node = 0;
  CHECK(gt.answer(ch).nodes == std::vector<int>{1, 2});
  CHECK_THROWS_AS(GroundTruthBackend(3, {{0, 1}, {1, 2}, {2, 0}}), CertdagError);
}

TEST_CASE("answers that do not fit the query are rejected") {
  OracleQuery q;
  q.kind = QueryKind::MetaHub;
  q.k = 2;
  CHECK_THROWS_WITH_AS(check_answer(q, OracleAnswer::hubs({1}, true), 4), doctest::Contains("k"), CertdagError);
  CHECK_THROWS_AS(check_answer(q, OracleAnswer::hubs({1, 1}, true), 4), CertdagError);
  CHECK_THROWS_AS(check_answer(q, OracleAnswer::per_edge(EdgeAnswer::Fwd), 4), CertdagError);
  OracleQuery c;
  c.kind = QueryKind::NodeChildren;
  c.node = 1;
  CHECK_THROWS_AS(check_answer(c, OracleAnswer::children({1}), 4), CertdagError);
  CHECK_NOTHROW(check_answer(c, OracleAnswer::children({0, 3}), 4));
}

TEST_CASE("scripted backend round-trips through CSV and enforces the order") {
  const std::string csv =
      "query_kind,edge_i,edge_j,node,answer\n"
      "META_HUB,,,,0 2 *\n"
      "NODE_CHILDREN,,,0,1 2\n"
      "PER_EDGE,1,3,,ABSENT\n";
  auto s = ScriptedBackend::from_csv_text(csv);
  CHECK(s.entries().size() == 3);
  CHECK(ScriptedBackend::from_csv_text(s.to_csv()).to_csv() == s.to_csv());
  OracleQuery hub;
  hub.kind = QueryKind::MetaHub;
  hub.k = 2;
  auto a = s.answer(hub);
  CHECK(a.complete);
  CHECK(a.nodes == std::vector<int>{0, 2});
  OracleQuery wrong;
  wrong.edge = Pair{0, 1};
  CHECK_THROWS_WITH_AS(s.answer(wrong), doctest::Contains(""), CertdagError);
}

TEST_CASE("question templates substitute placeholders and reject unknown keys") {
  const auto& t = QuestionTemplates::defaults();
  auto text = t.render("IMPOSSIBLE_LATENT_LIKELY", {{"x", "PKC"}, {"y", "PKA"}});
  CHECK(text.find("PKC-PKA") != std::string::npos);
  CHECK(text.find("FWD (PKC->PKA)") != std::string::npos);
  CHECK(substitute("{a} and {b}", {{"a", "1"}}) == "1 and {b}");
  CHECK_THROWS_AS(QuestionTemplates::from_json({{"NOPE", "x"}}), CertdagError);
  auto custom = QuestionTemplates::from_json({{"PER_EDGE", "edge {x} {y}"}});
  CHECK(custom.render("PER_EDGE", {{"x", "a"}, {"y", "b"}}) == "edge a b");
}

TEST_CASE("pure meta-hub protocol recovers asia in 1+K interactions") {
  const auto names = edge_list_names(kAsiaEdges);
  const auto truth = parse_edge_list(kAsiaEdges, names);
  GroundTruthBackend gt(static_cast<int>(names.size()), truth);
  auto r = run_pure_metahub(static_cast<int>(names.size()), gt, truth, names);
  CHECK(r.interactions == 1 + nonleaf_count(static_cast<int>(names.size()), truth));
  CHECK(r.interactions == 7);
  CHECK(matches(r.dag, truth));
  CHECK(r.dag.count(PairState::Open) == 0);
  CHECK(fold_trace(r.trace.events(), r.dag.vertices()) == r.dag);
  CHECK(r.trace.total_bits() == doctest::Approx(7.0));
}

TEST_CASE("pure meta-hub protocol is exact on random DAGs") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng() % 11);
    auto truth = random_dag(n, 0.3, rng);
    GroundTruthBackend gt(n, truth);
    auto r = run_pure_metahub(n, gt, truth);
    CHECK(r.interactions == 1 + nonleaf_count(n, truth));
    CHECK(matches(r.dag, truth));
  }
}

TEST_CASE("a missing child surfaces as IMPERFECT_ORACLE") {
  std::vector<DirectedEdge> truth{{0, 1}, {0, 2}};
  ScriptedBackend lying({{{QueryKind::MetaHub}, OracleAnswer::hubs({0}, true)},
                         {{QueryKind::NodeChildren, std::nullopt, 0}, OracleAnswer::children({1})}},
                        1);
  CHECK_THROWS_WITH_AS(run_pure_metahub(3, lying, truth), doctest::Contains("0"), CertdagError);
  try {
    ScriptedBackend again({{{QueryKind::MetaHub}, OracleAnswer::hubs({0}, true)},
                           {{QueryKind::NodeChildren, std::nullopt, 0}, OracleAnswer::children({1})}},
                          1);
    run_pure_metahub(3, again, truth);
  } catch (const CertdagError& e) {
    CHECK(e.code() == "IMPERFECT_ORACLE");
  }
}

TEST_CASE("per-edge session with a ground-truth oracle recovers the DAG") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 10; ++t) {
    const int n = 3 + static_cast<int>(rng() % 4);
    auto truth = random_dag(n, 0.4, rng);
    GroundTruthBackend gt(n, truth);
    auto data = noise_data(n, 60, 100 + t);
    auto r = run_iterative(data, oracle_only(OracleMode::PerEdge), gt);
    CHECK(matches(r.dag, truth));
    CHECK(r.dag.count(PairState::Open) == 0);
    CHECK(fold_trace(r.trace.events(), n) == r.dag);
    CHECK(r.interactions <= n * (n - 1) / 2);
    for (const auto& h : r.history)
      if (h.answer.edge == EdgeAnswer::Fwd || h.answer.edge == EdgeAnswer::Bwd)
        CHECK(static_cast<double>(h.derived) >= h.query.info_value);
  }
}

TEST_CASE("meta-hub and hybrid sessions recover the DAG") {
  std::mt19937_64 rng(12);
  for (auto mode : {OracleMode::MetahubChildren, OracleMode::Hybrid}) {
    for (int t = 0; t < 5; ++t) {
      const int n = 4 + static_cast<int>(rng() % 4);
      auto truth = random_dag(n, 0.35, rng);
      GroundTruthBackend gt(n, truth);
      auto r = run_iterative(noise_data(n, 60, 200 + t), oracle_only(mode), gt);
      CHECK(matches(r.dag, truth));
      CHECK(r.dag.count(PairState::Open) == 0);
      CHECK(r.interactions <= 1 + nonleaf_count(n, truth));
    }
  }
}

TEST_CASE("session rejects answers without a pending question and flags cycles") {
  auto cfg = oracle_only(OracleMode::PerEdge);
  cfg.propagation_enabled = false;  // otherwise acyclicity settles the last pair before it is asked
  Session s(noise_data(3, 60, 3), cfg);
  CHECK_THROWS_AS(s.answer(OracleAnswer::per_edge(EdgeAnswer::Fwd)), CertdagError);
  // Orient 0->1, 1->2, then claim 2->0: the last closes a cycle.
  std::map<Pair, EdgeAnswer> script{{Pair{0, 1}, EdgeAnswer::Fwd}, {Pair{1, 2}, EdgeAnswer::Fwd},
                                    {Pair{0, 2}, EdgeAnswer::Bwd}};
  bool saw_inconsistent = false;
  while (auto q = s.next_query()) {
    auto out = s.answer(OracleAnswer::per_edge(script.at(*q->edge)));
    if (out.inconsistent) {
      saw_inconsistent = true;
      CHECK(out.message.find("INCONSISTENT_ANSWER") == 0);
    }
  }
  CHECK(s.status() == SessionStatus::Done);
  CHECK(assert_acyclic(s.dag()));
  CHECK(saw_inconsistent);
  CHECK(s.dag().count(PairState::Open) == 1);
}

TEST_CASE("replay reproduces a recorded run and detects tampering") {
  std::mt19937_64 rng(21);
  auto truth = random_dag(5, 0.4, rng);
  GroundTruthBackend gt(5, truth);
  auto data = noise_data(5, 60, 9);
  const auto cfg = oracle_only(OracleMode::PerEdge);
  auto r = run_iterative(data, cfg, gt);
  REQUIRE(r.interactions > 0);
  auto recorded = Trace::from_csv_text(r.trace.to_csv());
  CHECK(replay(recorded, data, cfg) == r.dag);

  Trace tampered;
  bool flipped = false;
  for (auto e : recorded.events()) {
    if (!flipped && e.action == Action::Answer) {
      auto j = nlohmann::json::parse(e.detail);
      j["answer"] = j["answer"] == "ABSENT" ? "FWD" : "ABSENT";
      e.detail = j.dump();
      flipped = true;
    }
    tampered.append(e);
  }
  try {
    replay(tampered, data, cfg);
    FAIL("tampered trace replayed");
  } catch (const CertdagError& e) {
    CHECK(e.code() == "TRACE_MISMATCH");
  }

  auto pure = run_pure_metahub(5, gt, std::nullopt, data.names());
  CHECK(replay(Trace::from_csv_text(pure.trace.to_csv()), data, cfg) == pure.dag);
}
