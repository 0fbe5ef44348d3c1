#include <doctest.h>

#include <set>
#include <sstream>

#include "certdag/core/config.hpp"
#include "certdag/core/csv.hpp"
#include "certdag/core/dataset.hpp"
#include "certdag/core/partial_dag.hpp"
#include "certdag/core/trace.hpp"
#include "certdag/core/types.hpp"

using namespace certdag;

TEST_CASE("certificate codes round-trip and form a closed set of thirteen") {
  std::set<std::string> names;
  for (auto c : kAllCertificates) {
    auto s = std::string(to_string(c));
    names.insert(s);
    REQUIRE(certificate_from_string(s) == c);
  }
  CHECK(names.size() == 13);
  CHECK_FALSE(certificate_from_string("RESOLVED_LINEAR").has_value());
  CHECK_FALSE(is_impossible(CertificateCode::ResolvedMediated));
  CHECK(is_impossible(CertificateCode::ImpossibleCount));
}

TEST_CASE("tier and mechanism names round-trip") {
  for (Tier t : kLatticeOrder) CHECK(tier_from_string(to_string(t)) == t);
  CHECK(to_string(Tier::Stein) == "L_STEIN");
  CHECK(mechanism_from_string("M14") == Mechanism::M14);
  CHECK(mechanism_from_string("ORACLE") == Mechanism::Oracle);
}

TEST_CASE("csv parser handles quoting and rejects unterminated quotes") {
  auto rows = csv::parse("a,\"b,c\",\"d\"\"e\"\n1,2,3\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][1] == "b,c");
  CHECK(rows[0][2] == "d\"e");
  CHECK_THROWS_AS(csv::parse("a,\"b\n"), CertdagError);
  CHECK(csv::escape("x,y") == "\"x,y\"");
  CHECK(csv::escape("plain") == "plain");
}

TEST_CASE("dataset ingestion and metadata") {
  auto d = Dataset::from_csv_text("x,y,z\n1,0.5,0\n2,1.5,1\n3,2.25,0\n2,0.1,1\n");
  CHECK(d.rows() == 4);
  CHECK(d.vars() == 3);
  CHECK(d.index_of("y") == 1);
  CHECK(d.index_of("nope") == -1);
  CHECK(d.meta(0).is_integer_valued);
  CHECK(d.meta(0).cardinality == 3);
  CHECK_FALSE(d.meta(1).is_integer_valued);
  CHECK(d.meta(2).cardinality == 2);
  auto warnings = d.validate(1000);
  CHECK(warnings.size() == 1);
  CHECK(d.content_hash() == Dataset::from_csv_text("x,y,z\n1,0.5,0\n2,1.5,1\n3,2.25,0\n2,0.1,1\n").content_hash());

  CHECK_THROWS_AS(Dataset::from_csv_text("x,y\n1,2\n3\n"), CertdagError);
  CHECK_THROWS_AS(Dataset::from_csv_text("x,y\n1,abc\n3,4\n"), CertdagError);
  auto constant = Dataset::from_csv_text("x,y\n1,2\n1,3\n");
  CHECK_THROWS_AS(constant.validate(0), CertdagError);
}

TEST_CASE("assert_acyclic") {
  CHECK(assert_acyclic(PartialDag(0)));
  CHECK(assert_acyclic(PartialDag(3)));
  CHECK_FALSE(is_acyclic(3, {{0, 1}, {1, 2}, {2, 0}}));
  CHECK(is_acyclic(3, {{0, 1}, {1, 2}, {0, 2}}));
  // asia ground truth
  std::vector<DirectedEdge> asia{{0, 1}, {2, 3}, {2, 4}, {1, 5}, {3, 5}, {5, 6}, {5, 7}, {4, 7}};
  CHECK(is_acyclic(8, asia));
}

TEST_CASE("partial dag state transitions") {
  PartialDag g(4);
  CHECK(g.count(PairState::Open) == 6);
  REQUIRE(g.commit(Pair::of(0, 1), Direction::Fwd));
  REQUIRE(g.commit(Pair::of(1, 2), Direction::Fwd));
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_directed_path(0, 2));
  // 2 -> 0 would close a cycle
  CHECK_FALSE(g.commit(Pair::of(0, 2), Direction::Bwd));
  CHECK(g.is_open(Pair::of(0, 2)));
  CHECK(g.commit(Pair::of(0, 2), Direction::Fwd));
  g.drop(Pair::of(2, 3));
  g.exclude(Pair::of(1, 3));
  CHECK(g.state(Pair::of(1, 3)) == PairState::Absent);
  CHECK(g.open_pairs() == std::vector<Pair>{Pair::of(0, 3)});
  g.demote(Pair::of(0, 2));
  CHECK(g.is_open(Pair::of(0, 2)));
  CHECK(g.parents(2) == std::vector<int>{1});
  CHECK(g.children(0) == std::vector<int>{1});
  g.forbid(Pair::of(0, 3), Direction::Fwd);
  CHECK_FALSE(g.allowed(Pair::of(0, 3), Direction::Fwd));
  CHECK(g.allowed(Pair::of(0, 3), Direction::Bwd));
  CHECK(assert_acyclic(g));
  CHECK_THROWS(g.drop(Pair::of(0, 1)));  // not open
}

TEST_CASE("trace csv round-trip and fold") {
  Trace t;
  t.append({1, Mechanism::M1, Pair::of(0, 2), Action::Drop, "marginal p=0.4", 0.0});
  t.append({1, Mechanism::L0, Pair::of(0, 1), Action::CommitFwd, "detail, with comma \"q\"", 0.0});
  t.append({2, Mechanism::M6, Pair::of(1, 2), Action::CommitBwd, "", 0.0});
  t.append({3, Mechanism::M11, Pair::of(1, 3), Action::Query, "Direction?", 1.0});
  t.append({3, Mechanism::Oracle, Pair::of(1, 3), Action::Answer, "ABSENT", 0.0});
  t.append({3, Mechanism::Oracle, Pair::of(1, 3), Action::Drop, "oracle", 0.0});
  auto text = t.to_csv();
  CHECK(text.rfind("round,mechanism,edge_i,edge_j,action,detail,bits\n", 0) == 0);
  auto back = Trace::from_csv_text(text);
  REQUIRE(back.size() == t.size());
  CHECK(back.events() == t.events());
  CHECK(back.to_csv() == text);
  CHECK(t.total_bits() == doctest::Approx(1.0));

  auto g = fold_trace(t.events(), 4);
  CHECK(g.state(Pair::of(0, 2)) == PairState::Absent);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(2, 1));
  CHECK(g.state(Pair::of(1, 3)) == PairState::Dropped);
  CHECK(g.open_pairs() == std::vector<Pair>{Pair::of(0, 3), Pair::of(2, 3)});

  auto empty = fold_trace({}, 3);
  CHECK(empty.count(PairState::Open) == 3);
  CHECK_THROWS_AS(Trace::from_csv_text("round,mechanism\n1,M1\n"), CertdagError);
}

TEST_CASE("config json round-trip and validation") {
  Config c;
  c.seed = 42;
  c.tier_mask = TierMask::of({Tier::L0, Tier::L1, Tier::L2});
  c.oracle_mode = OracleMode::MetahubChildren;
  auto j = c.to_json();
  Config back = Config::from_json(j);
  CHECK(back.seed == 42);
  CHECK(back.tier_mask == c.tier_mask);
  CHECK(back.oracle_mode == OracleMode::MetahubChildren);
  CHECK(back.to_json() == j);

  CHECK_THROWS_AS(Config::from_json(nlohmann::json{{"alpha_skeleton", 1.5}}), CertdagError);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json{{"permutations", 100}}), CertdagError);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json{{"alpah_skeleton", 0.1}}), CertdagError);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json{{"tier_mask", {"L9"}}}), CertdagError);
}
