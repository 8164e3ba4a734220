#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "lector/endpoint.hpp"
#include "lector/reward_engine.hpp"

namespace lector {

/// Everything a pipeline run needs. Loaded from a `key = value` text file;
/// endpoint settings use dotted keys such as `judge.base_url`.
struct RunConfig {
  EndpointConfig generation;  // extraction and writing stages
  EndpointConfig judge;       // LLM-as-judge
  EndpointConfig embedding;
  EndpointConfig nli;

  RewardWeights weights;
  std::size_t keyphrase_k = kDefaultKeyphraseCount;
  bool fuzzy_match = false;
  double fuzzy_threshold = 0.5;
  bool mock = false;
  std::size_t mock_dimension = kDefaultMockDimension;
  int parallelism = 1;
  int judge_retries = 2;

  std::optional<std::filesystem::path> cache_dir;
  std::filesystem::path out_dir = "lector-out";
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path manifest = "corpus/manifest.json";
  std::optional<std::filesystem::path> template_dir;
  std::string system_name = "lector";

  RunConfig();

  /// Throws ConfigurationError. Endpoint sections are only checked when
  /// `mock` is off.
  void validate() const;

  /// Flat key -> value view in file syntax, sorted by key. API keys are never
  /// stored, only the names of their environment variables.
  std::map<std::string, std::string> to_map() const;
};

/// Applies `key = value` lines onto `base`. Blank lines and `#` comments are
/// skipped; unknown keys and malformed values raise ConfigurationError.
RunConfig parse_run_config(std::string_view text, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// Sets one key in file syntax.
void apply_config_value(RunConfig& config, std::string_view key, std::string_view value);

}  // namespace lector
