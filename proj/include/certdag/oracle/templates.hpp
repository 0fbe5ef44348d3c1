#pragma once

#include <json.hpp>
#include <map>
#include <string>

#include "certdag/core/types.hpp"

namespace certdag::oracle {

/// Wording table keyed by certificate code name, plus the keys RECOVERY, META_HUB and
/// NODE_CHILDREN. Placeholders in braces ({x}, {y}, {alpha}, ...) are substituted at
/// render time; unknown placeholders are left verbatim.
class QuestionTemplates {
 public:
  /// Built-in wording.
  static const QuestionTemplates& defaults();
  /// Overrides individual entries from a JSON object {key: text}; unknown keys are an error.
  static QuestionTemplates from_json(const nlohmann::json& j);
  static QuestionTemplates from_file(const std::string& path);

  const std::string& text(const std::string& key) const;
  std::string render(const std::string& key, const std::map<std::string, std::string>& vars) const;
  nlohmann::json to_json() const;

 private:
  std::map<std::string, std::string> table_;
};

std::string substitute(const std::string& text, const std::map<std::string, std::string>& vars);

}  // namespace certdag::oracle
