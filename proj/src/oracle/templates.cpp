#include "certdag/oracle/templates.hpp"

#include <fstream>

namespace certdag::oracle {

namespace {

constexpr const char* kAsk = " Direction: FWD ({x}->{y}) / BWD ({y}->{x}) / ABSENT?";

std::map<std::string, std::string> builtin() {
  std::map<std::string, std::string> t{
      {"IMPOSSIBLE_R1",
       "Edge {x}-{y}: both marginals are Gaussian and a linear fit leaves independent residuals either way, so "
       "the data cannot orient it."},
      // Fixed protocol wording.
      {"IMPOSSIBLE_LATENT_LIKELY",
       "Edge {x}-{y}: BOTH linear and nonlinear ANM reject independence in both directions. Most likely an "
       "unmeasured confounder. Is the {x}-{y} dependence direct, or due to an unmeasured common cause?"},
      {"IMPOSSIBLE_REGRESSOR_INCONSISTENT",
       "Edge {x}-{y}: the linear fit prefers {lin_dir} while the nonlinear fit prefers {nl_dir}."},
      {"IMPOSSIBLE_NONLINEAR_WEAK",
       "Edge {x}-{y}: nonlinear ANM is decisive at the {alpha} level but the asymmetry margin is weak "
       "(max p = {max_p})."},
      {"IMPOSSIBLE_HOC_AMBIGUOUS",
       "Edge {x}-{y}: higher-order cumulants lean {hoc_dir} (score {hoc}) but stay below the commit threshold."},
      {"IMPOSSIBLE_AMBIGUOUS", "Edge {x}-{y}: no tier found a usable asymmetry."},
      {"IMPOSSIBLE_L0_DISAGREES_WITH_HIGH_TIER",
       "Edge {x}-{y}: the linear ANM committed {l0_dir} but {high_tier} points the other way, so the commit was "
       "withdrawn."},
      {"IMPOSSIBLE_CIRCULAR",
       "Edge {x}-{y}: {circular} is an angle or phase, where additive-noise tests do not apply."},
      {"IMPOSSIBLE_BINARY_CONTINUOUS",
       "Edge {x}-{y}: one side is binary and the other continuous. Does the switch drive the level, or does a "
       "threshold on the level set the switch?"},
      {"IMPOSSIBLE_COUNT", "Edge {x}-{y}: over-dispersed count data, outside the additive-noise family."},
      {"IMPOSSIBLE_HIGH_CARDINALITY_DISCRETE",
       "Edge {x}-{y}: high-cardinality discrete variables, too many levels for the discrete tests."},
      {"RECOVERY",
       "Pair {x}-{y} was screened out as marginally independent (p = {marginal_p}). Is there a direct edge after "
       "all?"},
      {"PER_EDGE", "Edge {x}-{y}."},
      {"META_HUB", "List the {k} variables with the most direct effects (highest out-degree)."},
      {"NODE_CHILDREN", "Which variables does {node} directly cause? List all of them, or none."},
  };
  for (auto& [k, v] : t)
    if (k != "META_HUB" && k != "NODE_CHILDREN") v += kAsk;
  return t;
}

}  // namespace

const QuestionTemplates& QuestionTemplates::defaults() {
  static const QuestionTemplates d = [] {
    QuestionTemplates q;
    q.table_ = builtin();
    return q;
  }();
  return d;
}

QuestionTemplates QuestionTemplates::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw CertdagError("CONFIG_INVALID", "templates must be a JSON object");
  QuestionTemplates q = defaults();
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!q.table_.count(it.key())) throw CertdagError("CONFIG_INVALID", "unknown template key " + it.key());
    if (!it.value().is_string()) throw CertdagError("CONFIG_INVALID", "template " + it.key() + " must be a string");
    q.table_[it.key()] = it.value().get<std::string>();
  }
  return q;
}

QuestionTemplates QuestionTemplates::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CertdagError("CONFIG_INVALID", "cannot open templates " + path);
  auto j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded()) throw CertdagError("CONFIG_INVALID", "templates are not valid JSON: " + path);
  return from_json(j);
}

const std::string& QuestionTemplates::text(const std::string& key) const {
  auto it = table_.find(key);
  if (it == table_.end()) throw CertdagError("INVALID_QUERY", "no question template for " + key);
  return it->second;
}

std::string QuestionTemplates::render(const std::string& key, const std::map<std::string, std::string>& vars) const {
  return substitute(text(key), vars);
}

nlohmann::json QuestionTemplates::to_json() const { return table_; }

std::string substitute(const std::string& text, const std::map<std::string, std::string>& vars) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t k = 0; k < text.size(); ++k) {
    if (text[k] == '{') {
      auto close = text.find('}', k);
      if (close != std::string::npos) {
        auto it = vars.find(text.substr(k + 1, close - k - 1));
        if (it != vars.end()) {
          out += it->second;
          k = close;
          continue;
        }
      }
    }
    out += text[k];
  }
  return out;
}

}  // namespace certdag::oracle
