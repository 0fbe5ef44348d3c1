#include "certdag/core/config.hpp"

#include <fstream>
#include <json.hpp>

namespace certdag {

using nlohmann::json;

std::string_view to_string(OracleMode m) {
  switch (m) {
    case OracleMode::PerEdge: return "PER_EDGE";
    case OracleMode::MetahubChildren: return "METAHUB_CHILDREN";
    case OracleMode::Hybrid: return "HYBRID";
  }
  return "?";
}

std::string_view to_string(HsicMethod m) { return m == HsicMethod::Permutation ? "PERMUTATION" : "GAMMA_APPROX"; }

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw CertdagError("CONFIG_INVALID", msg); }

void check_prob(double p, const char* name) {
  if (!(p > 0.0 && p < 1.0)) invalid(std::string(name) + " must lie in (0, 1)");
}

OracleMode oracle_mode_from(const std::string& s) {
  if (s == "PER_EDGE") return OracleMode::PerEdge;
  if (s == "METAHUB_CHILDREN") return OracleMode::MetahubChildren;
  if (s == "HYBRID") return OracleMode::Hybrid;
  invalid("unknown oracle_mode " + s);
}

HsicMethod hsic_method_from(const std::string& s) {
  if (s == "PERMUTATION") return HsicMethod::Permutation;
  if (s == "GAMMA_APPROX") return HsicMethod::GammaApprox;
  invalid("unknown hsic_method " + s);
}

// Field table shared by to_json / from_json.
template <class Visitor>
void visit_fields(Config& c, Visitor&& v) {
  v("alpha_skeleton", c.alpha_skeleton);
  v("alpha_residual", c.alpha_residual);
  v("fdr_level", c.fdr_level);
  v("gauss_gate_p", c.gauss_gate_p);
  v("hetero_gate_p", c.hetero_gate_p);
  v("confirm_ratio", c.confirm_ratio);
  v("permutations", c.permutations);
  v("hsic_max_samples", c.hsic_max_samples);
  v("seed", c.seed);
  v("min_samples", c.min_samples);
  v("guard_enabled", c.guard_enabled);
  v("l1_margin", c.l1_margin);
  v("lsnm_margin", c.lsnm_margin);
  v("igci_threshold", c.igci_threshold);
  v("stein_ratio", c.stein_ratio);
  v("mdl_margin", c.mdl_margin);
  v("l2_threshold", c.l2_threshold);
  v("peit_margin", c.peit_margin);
  v("count_support_max", c.count_support_max);
  v("count_dispersion_min", c.count_dispersion_min);
  v("high_cardinality_min", c.high_cardinality_min);
  v("mediator_max_tier", c.mediator_max_tier);
  v("mediator_max_conditioning", c.mediator_max_conditioning);
  v("propagation_enabled", c.propagation_enabled);
  v("reaudit_enabled", c.reaudit_enabled);
  v("reaudit_safe_tiers", c.reaudit_safe_tiers);
  v("transitive_dsep_enabled", c.transitive_dsep_enabled);
  v("metahub_k", c.metahub_k);
  v("cascade_enabled", c.cascade_enabled);
  v("recovery_enabled", c.recovery_enabled);
  v("recovery_filter_marginal", c.recovery_filter_marginal);
  v("recovery_filter_degree", c.recovery_filter_degree);
  v("recovery_filter_reachability", c.recovery_filter_reachability);
  v("recovery_marginal_p", c.recovery_marginal_p);
  v("krr_landmarks", c.krr_landmarks);
  v("circular_variables", c.circular_variables);
}

}  // namespace

void Config::validate() const {
  check_prob(alpha_skeleton, "alpha_skeleton");
  check_prob(alpha_residual, "alpha_residual");
  check_prob(fdr_level, "fdr_level");
  check_prob(gauss_gate_p, "gauss_gate_p");
  check_prob(hetero_gate_p, "hetero_gate_p");
  check_prob(recovery_marginal_p, "recovery_marginal_p");
  if (permutations < 200) invalid("permutations must be >= 200");
  if (hsic_max_samples < 20) invalid("hsic_max_samples must be >= 20");
  if (mediator_max_tier < 1 || mediator_max_tier > 3) invalid("mediator_max_tier must be 1, 2 or 3");
  if (mediator_max_conditioning < 1) invalid("mediator_max_conditioning must be >= 1");
  if (min_samples < 0) invalid("min_samples must be >= 0");
  if (metahub_k < 0) invalid("metahub_k must be >= 0");
  if (krr_landmarks < 5) invalid("krr_landmarks must be >= 5");
  if (l1_margin < 0 || lsnm_margin < 0 || igci_threshold < 0 || stein_ratio < 1 || mdl_margin < 0 ||
      l2_threshold < 0 || peit_margin < 0)
    invalid("tier thresholds must be non-negative (stein_ratio >= 1)");
}

json Config::to_json() const {
  json j;
  Config copy = *this;
  visit_fields(copy, [&j](const char* key, auto& field) { j[key] = field; });
  j["hsic_method"] = to_string(hsic_method);
  j["oracle_mode"] = to_string(oracle_mode);
  j["info_value_strategy"] = info_value_strategy == InfoValueStrategy::WorstCase ? "WORST_CASE" : "EXPECTED";
  auto tiers = json::array();
  for (Tier t : kLatticeOrder)
    if (tier_mask.has(t)) tiers.push_back(to_string(t));
  j["tier_mask"] = tiers;
  return j;
}

Config Config::from_json(const json& j) {
  if (!j.is_object()) invalid("config must be a JSON object");
  Config c;
  std::size_t known = 0;
  try {
    visit_fields(c, [&](const char* key, auto& field) {
      if (j.contains(key)) {
        ++known;
        j.at(key).get_to(field);
      }
    });
    if (j.contains("hsic_method")) ++known, c.hsic_method = hsic_method_from(j["hsic_method"].get<std::string>());
    if (j.contains("oracle_mode")) ++known, c.oracle_mode = oracle_mode_from(j["oracle_mode"].get<std::string>());
    if (j.contains("info_value_strategy")) {
      ++known;
      auto s = j["info_value_strategy"].get<std::string>();
      if (s == "WORST_CASE") c.info_value_strategy = InfoValueStrategy::WorstCase;
      else if (s == "EXPECTED") c.info_value_strategy = InfoValueStrategy::Expected;
      else invalid("unknown info_value_strategy " + s);
    }
    if (j.contains("tier_mask")) {
      ++known;
      c.tier_mask = TierMask::none();
      for (const auto& name : j["tier_mask"]) {
        auto t = tier_from_string(name.get<std::string>());
        if (!t) invalid("unknown tier " + name.get<std::string>());
        c.tier_mask.set(*t);
      }
    }
  } catch (const json::exception& e) {
    invalid(std::string("config type error: ") + e.what());
  }
  if (known != j.size()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      json probe = Config{}.to_json();
      if (!probe.contains(it.key())) invalid("unknown config key " + it.key());
    }
  }
  c.validate();
  return c;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) invalid("cannot open config " + path);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) invalid("config is not valid JSON: " + path);
  return from_json(j);
}

}  // namespace certdag
