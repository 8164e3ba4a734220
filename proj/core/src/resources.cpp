#include "lector/resources.hpp"

#include <algorithm>
#include <utility>

#include "lector/errors.hpp"

namespace lector {
namespace detail {
extern const std::pair<std::string_view, std::string_view> kEmbeddedResources[];
extern const std::size_t kEmbeddedResourceCount;
}  // namespace detail

namespace {

const std::pair<std::string_view, std::string_view>* find(std::string_view name) {
  for (std::size_t i = 0; i < detail::kEmbeddedResourceCount; ++i) {
    if (detail::kEmbeddedResources[i].first == name) return &detail::kEmbeddedResources[i];
  }
  return nullptr;
}

}  // namespace

std::string_view resource(std::string_view name) {
  if (const auto* entry = find(name)) return entry->second;
  throw DataError("unknown bundled resource '" + std::string(name) + "'");
}

bool has_resource(std::string_view name) { return find(name) != nullptr; }

std::vector<std::string> resource_names() {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < detail::kEmbeddedResourceCount; ++i) {
    names.emplace_back(detail::kEmbeddedResources[i].first);
  }
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<std::string> resource_lines(std::string_view name) {
  std::vector<std::string> lines;
  std::string_view text = resource(name);
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' || line.back() == '\t')) {
      line.remove_suffix(1);
    }
    while (!line.empty() && (line.front() == ' ' || line.front() == '\t')) line.remove_prefix(1);
    if (line.empty() || line.front() == '#') continue;
    lines.emplace_back(line);
  }
  return lines;
}

}  // namespace lector
