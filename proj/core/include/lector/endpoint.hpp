#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lector/errors.hpp"

namespace lector {

struct EndpointConfig {
  std::string base_url;
  std::string model_name;
  std::string api_key_env;  // environment variable holding the bearer token
  double timeout_seconds = 60.0;
  int max_retries = 2;
  int max_concurrency = 4;

  /// Throws ConfigurationError when an invariant does not hold.
  void validate() const;
};

// ---------------------------------------------------------------------------
// Transport
// ---------------------------------------------------------------------------

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::string body;
};

/// Network-level failure (connection refused, timeout, TLS...). Always transient.
class TransportError : public Error {
 public:
  using Error::Error;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual HttpResponse post(const std::string& url, const std::string& body,
                            const HttpHeaders& headers, std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib backed transport; supports http:// and https:// URLs.
std::shared_ptr<Transport> make_http_transport();

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

/// Hex SHA-256 over (capability, model, canonical payload), NUL separated.
std::string cache_key(std::string_view capability, std::string_view model,
                      std::string_view canonical_payload);

/// Thread-safe response store. With a directory, every entry is also written to
/// `<dir>/<key>.json` as {"request": ..., "response": ...} and read back on
/// later runs.
class ResponseCache {
 public:
  explicit ResponseCache(std::optional<std::filesystem::path> directory = std::nullopt);

  std::optional<std::string> get(const std::string& key);
  void put(const std::string& key, std::string_view canonical_request, std::string_view response);

  /// Every key looked up or stored so far, sorted.
  std::vector<std::string> touched_keys() const;
  std::size_t size() const;

 private:
  std::optional<std::filesystem::path> directory_;
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
  std::set<std::string> touched_;
};

// ---------------------------------------------------------------------------
// Limiter / retry
// ---------------------------------------------------------------------------

class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int limit);

  void acquire();
  void release();
  int limit() const { return limit_; }

  class Slot {
   public:
    explicit Slot(ConcurrencyLimiter& limiter) : limiter_(limiter) { limiter_.acquire(); }
    ~Slot() { limiter_.release(); }
    Slot(const Slot&) = delete;
    Slot& operator=(const Slot&) = delete;

   private:
    ConcurrencyLimiter& limiter_;
  };

 private:
  int limit_;
  int in_use_ = 0;
  std::mutex mutex_;
  std::condition_variable cv_;
};

struct RetryPolicy {
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{8000};

  std::chrono::milliseconds delay_for(int retry_index) const;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

/// 5xx, 408 and 429 are retried; every other non-2xx status is final.
bool is_transient_status(int status);

// ---------------------------------------------------------------------------
// Endpoint client
// ---------------------------------------------------------------------------

/// Returns false (or throws) when a 2xx body is unusable; such bodies are
/// retried like transient failures and never cached.
using BodyCheck = std::function<bool(std::string_view)>;

/// POSTs JSON payloads to one configured endpoint with caching, bounded
/// retries and a per-endpoint in-flight limit. Identical concurrent requests
/// share a single upstream call.
class EndpointClient {
 public:
  EndpointClient(EndpointConfig config, std::shared_ptr<Transport> transport,
                 std::shared_ptr<ResponseCache> cache, RetryPolicy retry = {},
                 Sleeper sleeper = {});

  /// `path` is appended to base_url, e.g. "/chat/completions". Throws
  /// CapabilityUnavailable after exhausting retries or on a final status.
  std::string post(std::string_view capability, std::string_view path,
                   const std::string& canonical_payload, const BodyCheck& check = {});

  const EndpointConfig& config() const { return config_; }
  std::size_t upstream_calls() const;

 private:
  std::string fetch(const std::string& url, const std::string& payload, const BodyCheck& check);
  HttpHeaders headers() const;

  EndpointConfig config_;
  std::shared_ptr<Transport> transport_;
  std::shared_ptr<ResponseCache> cache_;
  RetryPolicy retry_;
  Sleeper sleeper_;
  ConcurrencyLimiter limiter_;

  mutable std::mutex mutex_;
  std::map<std::string, std::shared_future<std::string>> in_flight_;
  std::size_t upstream_calls_ = 0;
};

}  // namespace lector
