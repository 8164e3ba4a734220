#include "lector/prompts.hpp"

#include <algorithm>

#include "lector/corpus.hpp"
#include "lector/digest.hpp"
#include "lector/errors.hpp"
#include "lector/resources.hpp"

namespace lector {

namespace {

constexpr std::string_view kExtension = ".txt";

bool name_start(char c) { return (c >= 'a' && c <= 'z') || c == '_'; }
bool name_char(char c) { return name_start(c) || (c >= '0' && c <= '9'); }

/// Length of the placeholder at `pos` (including braces), or 0.
std::size_t placeholder_at(std::string_view t, std::size_t pos) {
  if (t[pos] != '{' || pos + 1 >= t.size() || !name_start(t[pos + 1])) return 0;
  std::size_t i = pos + 2;
  while (i < t.size() && name_char(t[i])) ++i;
  return i < t.size() && t[i] == '}' ? i - pos + 1 : 0;
}

bool is_template_resource(std::string_view name) {
  return name.ends_with(kExtension) && (name.starts_with("prompts/") || name.starts_with("judge/"));
}

}  // namespace

TemplateStore::TemplateStore(std::optional<std::filesystem::path> override_dir)
    : override_dir_(std::move(override_dir)) {}

std::string TemplateStore::get(std::string_view id) const {
  const std::string file = std::string(id) + std::string(kExtension);
  if (override_dir_) {
    const auto path = *override_dir_ / file;
    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec)) return read_file(path);
  }
  if (!has_resource(file)) throw DataError("unknown template '" + std::string(id) + "'");
  return std::string(resource(file));
}

bool TemplateStore::contains(std::string_view id) const {
  const std::string file = std::string(id) + std::string(kExtension);
  std::error_code ec;
  if (override_dir_ && std::filesystem::is_regular_file(*override_dir_ / file, ec)) return true;
  return has_resource(file);
}

std::vector<std::string> TemplateStore::ids() const {
  std::vector<std::string> out;
  for (const auto& name : resource_names()) {
    if (is_template_resource(name)) out.emplace_back(name.substr(0, name.size() - kExtension.size()));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::map<std::string, std::string> TemplateStore::digests() const {
  std::map<std::string, std::string> out;
  for (const auto& id : ids()) out.emplace(id, sha256_hex(get(id)));
  return out;
}

std::string render_template(std::string_view tmpl, const TemplateVars& vars) {
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t pos = 0; pos < tmpl.size();) {
    const std::size_t len = placeholder_at(tmpl, pos);
    if (len == 0) {
      out.push_back(tmpl[pos++]);
      continue;
    }
    const std::string_view name = tmpl.substr(pos + 1, len - 2);
    auto it = vars.find(name);
    if (it == vars.end()) throw ContractViolation("template placeholder {" + std::string(name) + "} is unbound");
    out += it->second;
    pos += len;
  }
  return out;
}

std::vector<std::string> template_placeholders(std::string_view tmpl) {
  std::vector<std::string> out;
  for (std::size_t pos = 0; pos < tmpl.size(); ++pos) {
    const std::size_t len = placeholder_at(tmpl, pos);
    if (len == 0) continue;
    std::string name(tmpl.substr(pos + 1, len - 2));
    if (std::find(out.begin(), out.end(), name) == out.end()) out.push_back(std::move(name));
    pos += len - 1;
  }
  return out;
}

}  // namespace lector
