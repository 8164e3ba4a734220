#include "lector/run_config.hpp"

#include <charconv>
#include <cmath>

#include "lector/corpus.hpp"

namespace lector {

namespace {

constexpr std::array<std::string_view, kGroupCount> kWeightKeys = {"gq", "gw", "pc", "wq", "cq"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigurationError("config key '" + std::string(key) + "': expected " + std::string(expected) + ", got '" +
                           std::string(value) + "'");
}

long long to_integer(std::string_view key, std::string_view value) {
  long long out = 0;
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || end != value.data() + value.size()) bad_value(key, value, "an integer");
  return out;
}

double to_real(std::string_view key, std::string_view value) {
  double out = 0;
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || end != value.data() + value.size() || !std::isfinite(out)) {
    bad_value(key, value, "a number");
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  bad_value(key, value, "true or false");
}

std::string format_real(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

EndpointConfig endpoint_defaults(std::string model) {
  EndpointConfig e;
  e.base_url = "http://localhost:8000/v1";
  e.model_name = std::move(model);
  e.api_key_env = "LECTOR_API_KEY";
  return e;
}

EndpointConfig* endpoint_section(RunConfig& c, std::string_view name) {
  if (name == "generation") return &c.generation;
  if (name == "judge") return &c.judge;
  if (name == "embedding") return &c.embedding;
  if (name == "nli") return &c.nli;
  return nullptr;
}

bool apply_endpoint_value(EndpointConfig& e, std::string_view field, std::string_view key, std::string_view value) {
  if (field == "base_url") {
    e.base_url = std::string(value);
  } else if (field == "model") {
    e.model_name = std::string(value);
  } else if (field == "api_key_env") {
    e.api_key_env = std::string(value);
  } else if (field == "timeout") {
    e.timeout_seconds = to_real(key, value);
  } else if (field == "max_retries") {
    e.max_retries = static_cast<int>(to_integer(key, value));
  } else if (field == "max_concurrency") {
    e.max_concurrency = static_cast<int>(to_integer(key, value));
  } else {
    return false;
  }
  return true;
}

}  // namespace

RunConfig::RunConfig()
    : generation(endpoint_defaults("Qwen3-4B-Instruct-2507")),
      judge(endpoint_defaults("Qwen3-235B")),
      embedding(endpoint_defaults("Qwen3-Embedding-0.6B")),
      nli(endpoint_defaults("mnli-base")) {}

void RunConfig::validate() const {
  weights.validate();
  if (parallelism < 1) throw ConfigurationError("parallelism must be >= 1");
  if (judge_retries < 0) throw ConfigurationError("judge_retries must be >= 0");
  if (keyphrase_k < 1) throw ConfigurationError("keyphrase_k must be >= 1");
  if (mock_dimension < 1) throw ConfigurationError("mock_dimension must be >= 1");
  if (!(fuzzy_threshold > 0 && fuzzy_threshold <= 1)) throw ConfigurationError("fuzzy_threshold must be in (0, 1]");
  if (out_dir.empty()) throw ConfigurationError("out_dir must not be empty");
  if (!mock) {
    for (const auto& [name, e] : {std::pair{"generation", &generation}, std::pair{"judge", &judge},
                                  std::pair{"embedding", &embedding}, std::pair{"nli", &nli}}) {
      try {
        e->validate();
      } catch (const ConfigurationError& err) {
        throw ConfigurationError(std::string(name) + ": " + err.what());
      }
    }
  }
}

std::map<std::string, std::string> RunConfig::to_map() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, e] : {std::pair{"generation", &generation}, std::pair{"judge", &judge},
                                std::pair{"embedding", &embedding}, std::pair{"nli", &nli}}) {
    const std::string prefix = std::string(name) + ".";
    out[prefix + "base_url"] = e->base_url;
    out[prefix + "model"] = e->model_name;
    out[prefix + "api_key_env"] = e->api_key_env;
    out[prefix + "timeout"] = format_real(e->timeout_seconds);
    out[prefix + "max_retries"] = std::to_string(e->max_retries);
    out[prefix + "max_concurrency"] = std::to_string(e->max_concurrency);
  }
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    out["weights." + std::string(kWeightKeys[g])] = format_real(weights.values[g]);
  }
  out["keyphrase_k"] = std::to_string(keyphrase_k);
  out["fuzzy_match"] = fuzzy_match ? "true" : "false";
  out["fuzzy_threshold"] = format_real(fuzzy_threshold);
  out["mock"] = mock ? "true" : "false";
  out["mock_dimension"] = std::to_string(mock_dimension);
  out["parallelism"] = std::to_string(parallelism);
  out["judge_retries"] = std::to_string(judge_retries);
  out["cache_dir"] = cache_dir ? cache_dir->generic_string() : "";
  out["out_dir"] = out_dir.generic_string();
  out["corpus_dir"] = corpus_dir.generic_string();
  out["manifest"] = manifest.generic_string();
  out["template_dir"] = template_dir ? template_dir->generic_string() : "";
  out["system_name"] = system_name;
  return out;
}

void apply_config_value(RunConfig& c, std::string_view key, std::string_view value) {
  if (auto dot = key.find('.'); dot != std::string_view::npos) {
    const std::string_view section = key.substr(0, dot);
    const std::string_view field = key.substr(dot + 1);
    if (section == "weights") {
      for (std::size_t g = 0; g < kGroupCount; ++g) {
        if (field == kWeightKeys[g]) {
          c.weights.values[g] = to_real(key, value);
          return;
        }
      }
    } else if (EndpointConfig* e = endpoint_section(c, section)) {
      if (apply_endpoint_value(*e, field, key, value)) return;
    }
    throw ConfigurationError("unknown config key '" + std::string(key) + "'");
  }

  auto optional_path = [&](std::optional<std::filesystem::path>& target) {
    if (value.empty()) {
      target.reset();
    } else {
      target = std::filesystem::path(std::string(value));
    }
  };

  if (key == "keyphrase_k") {
    long long k = to_integer(key, value);
    if (k < 1) bad_value(key, value, "a positive integer");
    c.keyphrase_k = static_cast<std::size_t>(k);
  } else if (key == "fuzzy_match") {
    c.fuzzy_match = to_bool(key, value);
  } else if (key == "fuzzy_threshold") {
    c.fuzzy_threshold = to_real(key, value);
  } else if (key == "mock") {
    c.mock = to_bool(key, value);
  } else if (key == "mock_dimension") {
    long long d = to_integer(key, value);
    if (d < 1) bad_value(key, value, "a positive integer");
    c.mock_dimension = static_cast<std::size_t>(d);
  } else if (key == "parallelism") {
    c.parallelism = static_cast<int>(to_integer(key, value));
  } else if (key == "judge_retries") {
    c.judge_retries = static_cast<int>(to_integer(key, value));
  } else if (key == "cache_dir") {
    optional_path(c.cache_dir);
  } else if (key == "out_dir") {
    c.out_dir = std::string(value);
  } else if (key == "corpus_dir") {
    c.corpus_dir = std::string(value);
  } else if (key == "manifest") {
    c.manifest = std::string(value);
  } else if (key == "template_dir") {
    optional_path(c.template_dir);
  } else if (key == "system_name") {
    c.system_name = std::string(value);
  } else {
    throw ConfigurationError("unknown config key '" + std::string(key) + "'");
  }
}

RunConfig parse_run_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigurationError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigurationError("config line " + std::to_string(line_no) + ": empty key");
    try {
      apply_config_value(base, key, value);
    } catch (const ConfigurationError& e) {
      throw ConfigurationError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return base;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError& e) {
    throw ConfigurationError(e.what());
  }
  return parse_run_config(text);
}

}  // namespace lector
