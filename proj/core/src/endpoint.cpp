#include "lector/endpoint.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "json.hpp"
#include "lector/corpus.hpp"
#include "lector/digest.hpp"

namespace lector {

void EndpointConfig::validate() const {
  if (base_url.rfind("http://", 0) != 0 && base_url.rfind("https://", 0) != 0) {
    throw ConfigurationError("endpoint base_url must start with http:// or https://, got '" + base_url + "'");
  }
  if (model_name.empty()) throw ConfigurationError("endpoint model_name is empty");
  if (!(timeout_seconds > 0) || !std::isfinite(timeout_seconds)) {
    throw ConfigurationError("endpoint timeout must be positive");
  }
  if (max_retries < 0) throw ConfigurationError("endpoint max_retries must be >= 0");
  if (max_concurrency < 1) throw ConfigurationError("endpoint max_concurrency must be >= 1");
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

std::string cache_key(std::string_view capability, std::string_view model, std::string_view canonical_payload) {
  std::string material;
  material.reserve(capability.size() + model.size() + canonical_payload.size() + 2);
  material.append(capability);
  material.push_back('\0');
  material.append(model);
  material.push_back('\0');
  material.append(canonical_payload);
  return sha256_hex(material);
}

ResponseCache::ResponseCache(std::optional<std::filesystem::path> directory) : directory_(std::move(directory)) {
  if (directory_) std::filesystem::create_directories(*directory_);
}

std::optional<std::string> ResponseCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  touched_.insert(key);
  if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  if (!directory_) return std::nullopt;

  const auto path = *directory_ / (key + ".json");
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) return std::nullopt;
  try {
    auto doc = nlohmann::json::parse(read_file(path));
    std::string response = doc.at("response").get<std::string>();
    entries_.emplace(key, response);
    return response;
  } catch (const std::exception&) {
    // A corrupt entry is treated as a miss and overwritten by the next put.
    return std::nullopt;
  }
}

void ResponseCache::put(const std::string& key, std::string_view canonical_request, std::string_view response) {
  std::lock_guard lock(mutex_);
  touched_.insert(key);
  entries_[key] = std::string(response);
  if (!directory_) return;
  nlohmann::ordered_json doc;
  doc["request"] = std::string(canonical_request);
  doc["response"] = std::string(response);
  write_file_atomic(*directory_ / (key + ".json"), doc.dump(2) + "\n");
}

std::vector<std::string> ResponseCache::touched_keys() const {
  std::lock_guard lock(mutex_);
  return {touched_.begin(), touched_.end()};
}

std::size_t ResponseCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

// ---------------------------------------------------------------------------
// Limiter / retry
// ---------------------------------------------------------------------------

ConcurrencyLimiter::ConcurrencyLimiter(int limit) : limit_(limit) {
  if (limit < 1) throw ConfigurationError("concurrency limit must be >= 1");
}

void ConcurrencyLimiter::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return in_use_ < limit_; });
  ++in_use_;
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(mutex_);
    --in_use_;
  }
  cv_.notify_one();
}

std::chrono::milliseconds RetryPolicy::delay_for(int retry_index) const {
  double ms = static_cast<double>(initial_backoff.count()) * std::pow(multiplier, retry_index);
  ms = std::min(ms, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds(static_cast<long long>(ms));
}

bool is_transient_status(int status) { return status >= 500 || status == 408 || status == 429; }

// ---------------------------------------------------------------------------
// Endpoint client
// ---------------------------------------------------------------------------

EndpointClient::EndpointClient(EndpointConfig config, std::shared_ptr<Transport> transport,
                               std::shared_ptr<ResponseCache> cache, RetryPolicy retry, Sleeper sleeper)
    : config_(std::move(config)),
      transport_(std::move(transport)),
      cache_(cache ? std::move(cache) : std::make_shared<ResponseCache>()),
      retry_(retry),
      sleeper_(sleeper ? std::move(sleeper) : Sleeper([](auto d) { std::this_thread::sleep_for(d); })),
      limiter_(config_.max_concurrency) {
  config_.validate();
  if (!transport_) throw ConfigurationError("endpoint client needs a transport");
}

std::size_t EndpointClient::upstream_calls() const {
  std::lock_guard lock(mutex_);
  return upstream_calls_;
}

HttpHeaders EndpointClient::headers() const {
  HttpHeaders h{{"Content-Type", "application/json"}};
  if (!config_.api_key_env.empty()) {
    if (const char* token = std::getenv(config_.api_key_env.c_str()); token && *token) {
      h.emplace_back("Authorization", std::string("Bearer ") + token);
    }
  }
  return h;
}

std::string EndpointClient::post(std::string_view capability, std::string_view path,
                                 const std::string& canonical_payload, const BodyCheck& check) {
  const std::string key = cache_key(capability, config_.model_name, canonical_payload);

  std::promise<std::string> promise;
  {
    std::unique_lock lock(mutex_);
    if (auto hit = cache_->get(key)) return *hit;
    if (auto it = in_flight_.find(key); it != in_flight_.end()) {
      auto shared = it->second;
      lock.unlock();
      return shared.get();
    }
    in_flight_.emplace(key, promise.get_future().share());
  }

  std::string base = config_.base_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  try {
    std::string body = fetch(base + std::string(path), canonical_payload, check);
    cache_->put(key, canonical_payload, body);
    promise.set_value(body);
    std::lock_guard lock(mutex_);
    in_flight_.erase(key);
    return body;
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::lock_guard lock(mutex_);
    in_flight_.erase(key);
    throw;
  }
}

std::string EndpointClient::fetch(const std::string& url, const std::string& payload, const BodyCheck& check) {
  const auto timeout = std::chrono::milliseconds(static_cast<long long>(config_.timeout_seconds * 1000.0));
  const HttpHeaders hdrs = headers();
  std::string last_error;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) sleeper_(retry_.delay_for(attempt - 1));
    try {
      HttpResponse response;
      {
        ConcurrencyLimiter::Slot slot(limiter_);
        {
          std::lock_guard lock(mutex_);
          ++upstream_calls_;
        }
        response = transport_->post(url, payload, hdrs, timeout);
      }
      if (response.status >= 200 && response.status < 300) {
        bool usable = true;
        last_error.clear();
        try {
          usable = !check || check(response.body);
        } catch (const std::exception& e) {
          usable = false;
          last_error = e.what();
        }
        if (usable) return response.body;
        if (last_error.empty()) last_error = "unusable response body";
        continue;
      }
      last_error = "HTTP " + std::to_string(response.status) + " from " + url;
      if (!is_transient_status(response.status)) throw CapabilityUnavailable(last_error);
    } catch (const TransportError& e) {
      last_error = e.what();
    }
  }
  throw CapabilityUnavailable("endpoint " + url + " failed after " + std::to_string(config_.max_retries + 1) +
                              " attempt(s): " + last_error);
}

}  // namespace lector
