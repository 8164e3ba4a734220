#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lector {

/// Returns the bundled data file registered under `name` (a path relative to
/// the data directory, e.g. "prompts/extraction.txt"). Throws DataError when
/// no such resource exists.
std::string_view resource(std::string_view name);

bool has_resource(std::string_view name);

std::vector<std::string> resource_names();

/// Non-empty, non-comment lines of a line-oriented resource.
std::vector<std::string> resource_lines(std::string_view name);

}  // namespace lector
