#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "certdag/bench/bench.hpp"
#include "certdag/oracle/session.hpp"
#include "certdag/service/service.hpp"

using namespace certdag;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitCsv = 2;
constexpr int kExitConfig = 3;
constexpr int kExitAbandoned = 4;

struct Abandoned : std::runtime_error {
  Abandoned() : std::runtime_error("session abandoned") {}
};

// Every Config field is exposed as --field-name; values are parsed as JSON when they
// parse, comma-separated lists for array fields, plain strings otherwise.
struct ConfigFlags {
  std::string config_path;
  std::map<std::string, std::string> values;

  // `skip` names fields the subcommand already exposes under its own flag.
  void attach(CLI::App* app, const std::set<std::string>& skip = {}) {
    app->add_option("--config", config_path, "config JSON file");
    const json defaults = Config{}.to_json();
    for (const auto& item : defaults.items()) {
      const std::string key = item.key();
      if (skip.count(key)) continue;
      std::string flag = key;
      std::replace(flag.begin(), flag.end(), '_', '-');
      app->add_option("--" + flag, values[key], "config field " + key);
    }
  }

  Config build() const {
    json j = json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw CertdagError("CONFIG_INVALID", "cannot open config " + config_path);
      j = json::parse(in, nullptr, false);
      if (j.is_discarded()) throw CertdagError("CONFIG_INVALID", "config is not valid JSON");
    }
    const json defaults = Config{}.to_json();
    for (const auto& [key, text] : values) {
      if (text.empty()) continue;
      if (defaults[key].is_array()) {
        json arr = json::array();
        std::stringstream ss(text);
        for (std::string item; std::getline(ss, item, ',');)
          if (!item.empty()) arr.push_back(item);
        j[key] = arr;
      } else if (defaults[key].is_string()) {
        j[key] = text;
      } else {
        auto v = json::parse(text, nullptr, false);
        if (v.is_discarded()) throw CertdagError("CONFIG_INVALID", "bad value for " + key + ": " + text);
        j[key] = v;
      }
    }
    return Config::from_json(j);
  }
};

std::string edge_label(const Dataset& d, DirectedEdge e) { return d.name(e.first) + " -> " + d.name(e.second); }

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

std::string edges_text(const Dataset& d, const PartialDag& dag) {
  std::string s;
  for (auto e : dag.committed_edges()) s += d.name(e.first) + " " + d.name(e.second) + "\n";
  return s;
}

oracle::OracleAnswer prompt(const oracle::OracleQuery& q, const Dataset& d) {
  std::cout << "\n" << q.question_text << "\n";
  if (q.kind == oracle::QueryKind::PerEdge) std::cout << "[FWD/BWD/ABSENT/UNKNOWN, q to quit] > ";
  else std::cout << "[space-separated names, empty for none, q to quit] > ";
  std::cout.flush();
  std::string line;
  if (!std::getline(std::cin, line) || line == "q" || line == "quit") throw Abandoned();
  json body = json::object();
  if (q.kind == oracle::QueryKind::PerEdge) {
    for (auto& c : line) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    body["answer"] = line;
  } else {
    json nodes = json::array();
    std::stringstream ss(line);
    for (std::string n; ss >> n;) nodes.push_back(n);
    body["nodes"] = nodes;
  }
  try {
    return service::parse_answer(body, q, d);
  } catch (const CertdagError& e) {
    std::cout << e.what() << "\n";
    return prompt(q, d);
  }
}

// Feeds the answers recorded in a trace first, then defers to `rest`.
class ResumingBackend : public oracle::OracleBackend {
 public:
  ResumingBackend(oracle::ScriptedBackend script, oracle::OracleBackend& rest) : script_(std::move(script)), rest_(rest) {}
  oracle::OracleAnswer answer(const oracle::OracleQuery& q) override {
    return script_.exhausted() ? rest_.answer(q) : script_.answer(q);
  }
  std::optional<int> known_k() const override { return rest_.known_k() ? rest_.known_k() : script_.known_k(); }
  std::string name() const override { return rest_.name(); }

 private:
  oracle::ScriptedBackend script_;
  oracle::OracleBackend& rest_;
};

void print_report(const oracle::Session& s) {
  const auto& d = s.data();
  std::cout << "committed " << s.dag().count(PairState::Committed) << ", open " << s.dag().count(PairState::Open)
            << ", dropped " << s.dag().count(PairState::Dropped) << "\n";
  for (auto e : s.dag().committed_edges()) {
    const auto& rec = s.records().at(Pair::of(e.first, e.second));
    std::cout << "  " << edge_label(d, e) << "  "
              << (rec.provenance ? std::string(to_string(*rec.provenance)) : std::string("?")) << "\n";
  }
  auto rep = s.report();
  for (const auto& r : rep["residual"])
    std::cout << "  " << r["pair"][0].get<std::string>() << " - " << r["pair"][1].get<std::string>() << "  "
              << r["certificate"].get<std::string>() << "\n    " << r["question"].get<std::string>() << "\n";
}

int cmd_audit(const std::string& csv, const ConfigFlags& flags, const std::string& templates,
              const std::string& report_path) {
  auto data = Dataset::from_csv(csv);
  const Config cfg = flags.build();
  for (const auto& w : data.validate(cfg.min_samples)) std::cerr << "warning: " << w << "\n";
  if (data.vars() < 2) std::cerr << "warning: fewer than two variables, nothing to audit\n";
  oracle::Session s(data, cfg,
                    templates.empty() ? oracle::QuestionTemplates::defaults() : oracle::QuestionTemplates::from_file(templates));
  s.audit();
  print_report(s);
  write_text(report_path, s.report().dump(2) + "\n");
  return 0;
}

struct IterateArgs {
  std::string csv, gt, script, mode = "per-edge", trace_out, edges_out, eval_out, resume, templates;
  bool interactive = false;
};

int cmd_iterate(const IterateArgs& a, const ConfigFlags& flags) {
  auto data = Dataset::from_csv(a.csv);
  Config cfg = flags.build();
  const bool pure = a.mode == "pure-metahub";
  if (a.mode == "per-edge") cfg.oracle_mode = OracleMode::PerEdge;
  else if (a.mode == "metahub-children") cfg.oracle_mode = OracleMode::MetahubChildren;
  else if (a.mode == "hybrid") cfg.oracle_mode = OracleMode::Hybrid;
  else if (!pure) throw CertdagError("CONFIG_INVALID", "unknown mode " + a.mode);

  std::optional<std::vector<DirectedEdge>> gt;
  if (!a.gt.empty()) gt = oracle::read_edge_list(a.gt, data.names());
  std::unique_ptr<oracle::OracleBackend> backend;
  if (!a.script.empty()) backend = std::make_unique<oracle::ScriptedBackend>(oracle::ScriptedBackend::from_csv(a.script));
  else if (a.interactive)
    backend = std::make_unique<oracle::InteractiveBackend>([&](const oracle::OracleQuery& q) { return prompt(q, data); },
                                                           gt ? std::optional<int>(oracle::nonleaf_count(data.vars(), *gt))
                                                              : std::nullopt);
  else if (gt) backend = std::make_unique<oracle::GroundTruthBackend>(data.vars(), *gt);
  else throw CertdagError("CONFIG_INVALID", "iterate needs --gt, --script or --interactive");

  std::unique_ptr<oracle::OracleBackend> resumed;
  oracle::OracleBackend* b = backend.get();
  if (!a.resume.empty()) {
    resumed = std::make_unique<ResumingBackend>(oracle::script_from_trace(Trace::read_csv(a.resume)), *backend);
    b = resumed.get();
  }
  const auto templates =
      a.templates.empty() ? oracle::QuestionTemplates::defaults() : oracle::QuestionTemplates::from_file(a.templates);

  oracle::RunResult r;
  int code = 0;
  if (pure) {
    r = oracle::run_pure_metahub(data.vars(), *b, std::nullopt, data.names());
  } else {
    oracle::Session s(data, cfg, templates, b->known_k());
    try {
      while (auto q = s.next_query()) s.answer(b->answer(*q));
    } catch (const Abandoned&) {
      code = kExitAbandoned;
      std::cerr << "session abandoned after " << s.interactions() << " answers; trace kept for --resume\n";
    }
    r = {s.dag(), s.trace(), s.interactions(), s.history()};
  }
  write_text(a.trace_out, r.trace.to_csv());
  write_text(a.edges_out, edges_text(data, r.dag));
  std::cout << "interactions " << r.interactions << ", committed " << r.dag.count(PairState::Committed) << "\n";
  if (gt) {
    auto ev = bench::evaluate(r.dag, *gt, r.trace);
    std::printf("precision %.3f%s recall %.3f f1 %.3f\n", ev.precision, ev.precision_defined ? "" : " (undefined)",
                ev.recall, ev.f1);
    write_text(a.eval_out, ev.to_json().dump(2) + "\n");
  }
  return code;
}

std::string seeded(const std::string& dir, const std::string& stem, std::uint64_t seed) {
  if (dir.empty()) return {};
  fs::create_directories(dir);
  return (fs::path(dir) / (stem + "_seed" + std::to_string(seed) + ".csv")).string();
}

int cmd_bench(const std::string& what, std::uint64_t seed, const std::string& manifest_path, const std::string& out,
              const ConfigFlags& flags) {
  Config cfg = flags.build();
  cfg.seed = seed;
  const auto manifest = bench::load_manifest(manifest_path);
  const bool all = what == "all";
  if (all || what == "onek") {
    std::string csv = "fixture,V,gt_edges,K,queries,precision,recall,f1\n";
    std::cout << "fixture       V   E   K   queries  P      R      F1\n";
    for (const auto& f : manifest) {
      if (f.name == "sachs_853") continue;
      std::vector<std::string> names;
      auto gt = bench::load_fixture_gt(f, names);
      oracle::GroundTruthBackend backend(f.vertices, gt);
      auto r = oracle::run_pure_metahub(f.vertices, backend, gt, names);
      auto ev = bench::evaluate(r.dag, gt, r.trace);
      std::printf("%-12s %3d %3d %3d %6d   %.3f  %.3f  %.3f\n", f.name.c_str(), f.vertices, f.gt_edges, f.k,
                  r.interactions, ev.precision, ev.recall, ev.f1);
      std::ostringstream row;
      row << f.name << ',' << f.vertices << ',' << f.gt_edges << ',' << f.k << ',' << r.interactions << ','
          << ev.precision << ',' << ev.recall << ',' << ev.f1 << '\n';
      csv += row.str();
    }
    write_text(seeded(out, "onek", seed), csv);
  }
  if (all || what == "tiers") {
    std::vector<bench::RegimeSpec> specs;
    for (auto r : bench::kAllRegimes) specs.push_back({r, 40, 2000, seed});
    auto m = bench::run_tier_matrix(specs, cfg);
    std::cout << m.to_table();
    write_text(seeded(out, "tiers", seed), m.to_csv());
  }
  if (all || what == "ablation" || what == "pareto") {
    const auto f = bench::find_fixture(manifest, "sachs_853");
    auto data = Dataset::from_csv(f.csv);
    auto names = data.names();
    auto gt = bench::load_fixture_gt(f, names);
    if (all || what == "ablation") {
      std::string csv = "configuration,commits,correct,queries_left,precision,demoted\n";
      std::cout << "configuration  commits correct left precision demoted\n";
      for (const auto& row : bench::run_ablation(data, gt, cfg)) {
        std::printf("%-14s %5d %7d %5d %9.3f %5d\n", row.label.c_str(), row.commits, row.correct, row.queries_left,
                    row.precision, row.demoted);
        std::ostringstream o;
        o << row.label << ',' << row.commits << ',' << row.correct << ',' << row.queries_left << ',' << row.precision
          << ',' << row.demoted << '\n';
        csv += o.str();
      }
      write_text(seeded(out, "ablation", seed), csv);
    }
    if (all || what == "pareto") {
      std::string csv = "strategy,queries,precision,recall,f1\n";
      for (const auto& p : bench::run_pareto(data, gt, cfg)) {
        std::printf("%-16s queries %3d  P %.3f  R %.3f  F1 %.3f\n", p.strategy.c_str(), p.queries, p.eval.precision,
                    p.eval.recall, p.eval.f1);
        std::ostringstream o;
        o << p.strategy << ',' << p.queries << ',' << p.eval.precision << ',' << p.eval.recall << ',' << p.eval.f1
          << '\n';
        csv += o.str();
      }
      write_text(seeded(out, "pareto", seed), csv);
    }
  }
  return 0;
}

int cmd_stress(int dags, int max_v, double edge_p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  int exact = 0;
  for (int t = 0; t < dags; ++t) {
    const int n = 2 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_v - 1));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::bernoulli_distribution coin(edge_p);
    std::vector<DirectedEdge> truth;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (coin(rng)) truth.emplace_back(order[static_cast<std::size_t>(a)], order[static_cast<std::size_t>(b)]);
    oracle::GroundTruthBackend gt(n, truth);
    auto r = oracle::run_pure_metahub(n, gt, truth);
    auto got = r.dag.committed_edges();
    std::sort(got.begin(), got.end());
    std::sort(truth.begin(), truth.end());
    const bool ok = r.interactions == 1 + oracle::nonleaf_count(n, truth) && got == truth;
    exact += ok ? 1 : 0;
  }
  std::cout << "random DAGs recovered exactly in 1+K: " << exact << "/" << dags << "\n";
  return exact == dags ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certificate-driven causal discovery with an expert oracle"};
  app.require_subcommand(1);

  ConfigFlags audit_flags, iterate_flags, bench_flags;
  std::string audit_csv, audit_templates, audit_report;
  auto* audit = app.add_subcommand("audit", "rounds 1-2: certify every candidate edge");
  audit->add_option("csv", audit_csv, "dataset CSV")->required();
  audit->add_option("--templates", audit_templates, "question template overrides (JSON)");
  audit->add_option("--report", audit_report, "write the JSON report here");
  audit_flags.attach(audit);

  IterateArgs it;
  auto* iterate = app.add_subcommand("iterate", "full loop against an oracle");
  iterate->add_option("csv", it.csv, "dataset CSV")->required();
  iterate->add_option("--gt", it.gt, "ground-truth edge list (simulated oracle)");
  iterate->add_option("--script", it.script, "scripted answers CSV");
  iterate->add_flag("--interactive", it.interactive, "answer questions on the console");
  iterate->add_option("--mode", it.mode, "per-edge | metahub-children | hybrid | pure-metahub");
  iterate->add_option("--trace", it.trace_out, "write the trace CSV here");
  iterate->add_option("--edges", it.edges_out, "write the final edge list here");
  iterate->add_option("--eval", it.eval_out, "write the evaluation JSON here");
  iterate->add_option("--resume", it.resume, "replay the answers of this trace first");
  iterate->add_option("--templates", it.templates, "question template overrides (JSON)");
  iterate_flags.attach(iterate);

  std::string bench_what = "all", bench_out, manifest = (fs::path(bench::fixture_dir()) / "manifest.json").string();
  std::uint64_t bench_seed = 0;
  auto* bench_cmd = app.add_subcommand("bench", "benchmark tables on the fixtures");
  bench_cmd->add_option("what", bench_what, "onek | tiers | ablation | pareto | all");
  bench_cmd->add_option("--seed", bench_seed, "run seed")->required();
  bench_cmd->add_option("--manifest", manifest, "fixture manifest");
  bench_cmd->add_option("--out", bench_out, "directory for results CSVs");
  bench_flags.attach(bench_cmd, {"seed"});

  int stress_dags = 200, stress_v = 12;
  double stress_p = 0.3;
  std::uint64_t stress_seed = 1;
  auto* stress = app.add_subcommand("stress", "1+K protocol on random DAGs");
  stress->add_option("--dags", stress_dags);
  stress->add_option("--max-v", stress_v)->check(CLI::Range(2, 1000));
  stress->add_option("--edge-p", stress_p)->check(CLI::Range(0.0, 1.0));
  stress->add_option("--seed", stress_seed);

  std::string host = "127.0.0.1", state_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "HTTP session service");
  serve->add_option("--host", host);
  serve->add_option("--port", port);
  serve->add_option("--state-dir", state_dir, "persist sessions here");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*audit) return cmd_audit(audit_csv, audit_flags, audit_templates, audit_report);
    if (*iterate) return cmd_iterate(it, iterate_flags);
    if (*bench_cmd) return cmd_bench(bench_what, bench_seed, manifest, bench_out, bench_flags);
    if (*stress) return cmd_stress(stress_dags, stress_v, stress_p, stress_seed);
    if (*serve) {
      service::SessionService svc(state_dir);
      std::cerr << "listening on " << host << ":" << port << "\n";
      service::serve(svc, host, port);
      return 0;
    }
  } catch (const CertdagError& e) {
    std::cerr << e.code() << ": " << e.what() << "\n";
    if (e.code() == "MALFORMED_CSV") return kExitCsv;
    if (e.code() == "CONFIG_INVALID") return kExitConfig;
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
