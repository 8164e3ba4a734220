#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lector {

using TemplateVars = std::map<std::string, std::string, std::less<>>;

/// Prompt templates by id ("prompts/extraction", "judge/problem_clarity", ...).
/// Lookups read `<override_dir>/<id>.txt` when present, otherwise the bundled
/// copy.
class TemplateStore {
 public:
  explicit TemplateStore(std::optional<std::filesystem::path> override_dir = std::nullopt);

  /// Throws DataError for an unknown id.
  std::string get(std::string_view id) const;
  bool contains(std::string_view id) const;

  /// Every bundled template id (without extension), sorted.
  std::vector<std::string> ids() const;

  /// id -> hex SHA-256 of the effective template text.
  std::map<std::string, std::string> digests() const;

 private:
  std::optional<std::filesystem::path> override_dir_;
};

/// Substitutes `{name}` placeholders (name = [a-z_][a-z0-9_]*). Throws
/// ContractViolation if a placeholder has no binding. Braces that do not form
/// a placeholder are left alone.
std::string render_template(std::string_view tmpl, const TemplateVars& vars);

/// Placeholder names in first-appearance order.
std::vector<std::string> template_placeholders(std::string_view tmpl);

}  // namespace lector
