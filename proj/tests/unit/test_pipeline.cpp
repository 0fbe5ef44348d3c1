#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <fstream>
#include <random>

#include "certdag/bench/bench.hpp"
#include "certdag/cascade/cascade.hpp"
#include "certdag/skeleton/skeleton.hpp"

using namespace certdag;
namespace fs = std::filesystem;

namespace {

// x -> y -> z with a nonlinear first link; w is independent of all three.
Dataset chain_data(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  Eigen::MatrixXd m(n, 4);
  for (int r = 0; r < n; ++r) {
    const double x = u(rng);
    const double y = std::sin(1.5 * x) + 0.3 * g(rng);
    const double z = 0.9 * y + 0.3 * g(rng);
    m.row(r) << x, y, z, g(rng);
  }
  return Dataset(std::move(m), {"x", "y", "z", "w"});
}

std::string error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const CertdagError& e) {
    return e.code();
  }
  return {};
}

}  // namespace

TEST_CASE("skeleton keeps dependent pairs, drops the independent column, and finds the mediator") {
  Config cfg;
  cfg.min_samples = 100;
  auto data = chain_data(600, 21);
  stats::StatsContext ctx(data, cfg);
  auto sk = skeleton::build_skeleton(ctx);
  CHECK(sk.contains(Pair::of(0, 1)));
  CHECK(sk.contains(Pair::of(1, 2)));
  for (int v = 0; v < 3; ++v) CHECK_FALSE(sk.contains(Pair::of(v, 3)));
  CHECK(sk.marginal_p.size() == 6);
  if (sk.contains(Pair::of(0, 2))) {
    auto med = skeleton::find_mediator(Pair::of(0, 2), sk, ctx);
    REQUIRE(med);
    CHECK(med->mediated_by == std::vector<int>{1});
  }
  // Neither link of the chain is explained away by the far end.
  CHECK_FALSE(skeleton::find_mediator(Pair::of(0, 1), sk, ctx));
  CHECK_FALSE(skeleton::find_mediator(Pair::of(1, 2), sk, ctx));
}

TEST_CASE("cascade verdicts agree with the generating direction when they commit") {
  Config cfg;
  cfg.seed = 1000;
  for (auto regime : {bench::Regime::NearDet, bench::Regime::Discrete}) {
    CAPTURE(bench::to_string(regime));
    auto pairs = bench::generate_regime({regime, 6, 2000, 1000});
    int committed = 0;
    for (const auto& rp : pairs) {
      stats::StatsContext ctx(rp.data, cfg);
      auto v = cascade::run_cascade(Pair{0, 1}, ctx);
      CHECK((v.certificate == CertificateCode::ResolvedDecisive) == v.final.has_value());
      if (!v.final) continue;
      ++committed;
      CHECK(v.committed_by.has_value());
      CHECK(*v.final == rp.truth);
    }
    CHECK(committed >= 4);
  }
}

TEST_CASE("non-Gaussianity tiers abstain on linear Gaussian pairs") {
  Config cfg;
  cfg.seed = 1000;
  for (const auto& rp : bench::generate_regime({bench::Regime::LinGauss, 6, 2000, 1000})) {
    stats::StatsContext ctx(rp.data, cfg);
    for (Tier t : {Tier::L0, Tier::LSNM, Tier::IGCI, Tier::Stein}) {
      CAPTURE(to_string(t));
      CHECK(cascade::tier_decide(t, ctx, Pair{0, 1}).outcome == cascade::Outcome::Abstain);
    }
  }
}

TEST_CASE("evaluate scores direction-aware edges") {
  const std::vector<DirectedEdge> gt{{0, 1}, {1, 2}, {1, 3}, {3, 4}};
  auto r = bench::evaluate({{0, 1}, {2, 1}, {1, 3}}, gt);
  CHECK(r.committed == 3);
  CHECK(r.correct == 2);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall == doctest::Approx(0.5));
  CHECK(r.f1 == doctest::Approx(4.0 / 7.0));
  auto empty = bench::evaluate({}, gt);
  CHECK_FALSE(empty.precision_defined);
  CHECK(empty.precision == 0.0);
  CHECK(empty.recall == 0.0);
}

TEST_CASE("fixture manifest loads and validates") {
  const auto all = bench::load_manifest((fs::path(CERTDAG_FIXTURE_DIR) / "manifest.json").string());
  const auto asia = bench::find_fixture(all, "asia");
  std::vector<std::string> names;
  const auto gt = bench::load_fixture_gt(asia, names);
  CHECK(gt.size() == 8);
  CHECK(names.size() == 8);
  CHECK(error_code([&] { bench::find_fixture(all, "missing"); }) != "");

  const auto bad = fs::temp_directory_path() / "certdag_bad_manifest.json";
  std::ofstream(bad) << R"({"fixtures": [{"name": 3}]})";
  CHECK(error_code([&] { bench::load_manifest(bad.string()); }) == "MALFORMED_MANIFEST");
  fs::remove(bad);
}
