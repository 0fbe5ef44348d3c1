// Dumps every tier's gate and raw scores on the synthetic regimes, one CSV row per
// (regime, pair, tier). Used to pick the frozen tier thresholds on a calibration seed.
#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <iostream>
#include <map>

#include "certdag/bench/regimes.hpp"
#include "certdag/cascade/cascade.hpp"

using namespace certdag;

int main(int argc, char** argv) {
  CLI::App app{"tier score dump"};
  std::uint64_t seed = 1000;
  int pairs = 40, samples = 2000;
  app.add_option("--seed", seed);
  app.add_option("--pairs", pairs);
  app.add_option("--samples", samples);
  std::vector<std::string> only;
  app.add_option("--tiers", only, "restrict to these tier names");
  CLI11_PARSE(app, argc, argv);

  Config cfg;
  cfg.seed = seed;
  std::map<std::string, double> elapsed;
  std::cout << "regime,pair,truth,tier,gate,outcome,scores\n";
  for (auto regime : bench::kAllRegimes) {
    auto data = bench::generate_regime({regime, pairs, samples, seed});
    for (std::size_t k = 0; k < data.size(); ++k) {
      stats::StatsContext ctx(data[k].data, cfg);
      for (Tier t : kLatticeOrder) {
        if (!only.empty() && std::find(only.begin(), only.end(), to_string(t)) == only.end()) continue;
        auto t0 = std::chrono::steady_clock::now();
        auto d = cascade::tier_decide(t, ctx, Pair{0, 1});
        elapsed[std::string(to_string(t))] += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        nlohmann::json s = d.scores;
        std::cout << bench::to_string(regime) << ',' << k << ',' << to_string(data[k].truth) << ','
                  << to_string(t) << ',' << d.gate_passed << ',' << cascade::to_string(d.outcome) << ",\""
                  << [&] { auto x = s.dump(); std::string o; for (char c : x) { if (c == '"') o += "\"\""; else o += c; } return o; }()
                  << "\"\n";
      }
    }
  }
  for (auto& [k, v] : elapsed) std::cerr << k << ' ' << v << "s\n";
}
