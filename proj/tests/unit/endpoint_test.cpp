#include <gtest/gtest.h>

#include <atomic>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <thread>

#include "json.hpp"
#include "lector/corpus.hpp"
#include "lector/digest.hpp"
#include "lector/endpoint.hpp"
#include "test_support.hpp"

namespace lector {
namespace {

using namespace std::chrono_literals;

/// Replays queued responses; an empty queue answers 200 "ok". A status of -1
/// raises a TransportError.
class ScriptedTransport : public Transport {
 public:
  explicit ScriptedTransport(std::deque<HttpResponse> script = {}, std::chrono::milliseconds delay = 0ms)
      : script_(std::move(script)), delay_(delay) {}

  HttpResponse post(const std::string& url, const std::string& body, const HttpHeaders& headers,
                    std::chrono::milliseconds) override {
    const int now = ++active_;
    int seen = peak_.load();
    while (now > seen && !peak_.compare_exchange_weak(seen, now)) {
    }
    if (delay_ > 0ms) std::this_thread::sleep_for(delay_);
    HttpResponse r{200, "ok"};
    {
      std::lock_guard lock(mutex_);
      ++calls_;
      last_url_ = url;
      last_body_ = body;
      last_headers_ = headers;
      if (!script_.empty()) {
        r = script_.front();
        script_.pop_front();
      }
    }
    --active_;
    if (r.status == -1) throw TransportError("connection refused");
    return r;
  }

  int calls() const {
    std::lock_guard lock(mutex_);
    return calls_;
  }
  int peak() const { return peak_; }
  std::string last_url() const {
    std::lock_guard lock(mutex_);
    return last_url_;
  }
  HttpHeaders last_headers() const {
    std::lock_guard lock(mutex_);
    return last_headers_;
  }

 private:
  mutable std::mutex mutex_;
  std::deque<HttpResponse> script_;
  std::chrono::milliseconds delay_;
  int calls_ = 0;
  std::atomic<int> active_{0};
  std::atomic<int> peak_{0};
  std::string last_url_;
  std::string last_body_;
  HttpHeaders last_headers_;
};

EndpointConfig config(int retries = 2, int concurrency = 4) {
  EndpointConfig c;
  c.base_url = "http://judge.local/v1/";
  c.model_name = "m";
  c.api_key_env = "LECTOR_TEST_KEY";
  c.max_retries = retries;
  c.max_concurrency = concurrency;
  return c;
}

struct RecordingSleeper {
  std::shared_ptr<std::vector<std::chrono::milliseconds>> delays = std::make_shared<std::vector<std::chrono::milliseconds>>();
  Sleeper fn() {
    auto d = delays;
    return [d](std::chrono::milliseconds ms) { d->push_back(ms); };
  }
};

TEST(EndpointConfig, Validation) {
  EXPECT_NO_THROW(config().validate());
  auto bad = config();
  bad.base_url = "ftp://x";
  EXPECT_THROW(bad.validate(), ConfigurationError);
  bad = config();
  bad.model_name.clear();
  EXPECT_THROW(bad.validate(), ConfigurationError);
  bad = config();
  bad.max_concurrency = 0;
  EXPECT_THROW(bad.validate(), ConfigurationError);
  bad = config();
  bad.max_retries = -1;
  EXPECT_THROW(bad.validate(), ConfigurationError);
  bad = config();
  bad.timeout_seconds = 0;
  EXPECT_THROW(bad.validate(), ConfigurationError);
}

TEST(CacheKey, HashesNulSeparatedFields) {
  using namespace std::string_literals;
  EXPECT_EQ(cache_key("chat", "m", "{}"), sha256_hex("chat\0m\0{}"s));
  EXPECT_NE(cache_key("chat", "m", "{}"), cache_key("cha", "tm", "{}"));
  EXPECT_EQ(cache_key("a", "b", "c").size(), 64u);
}

TEST(Retry, BackoffGrowsAndCaps) {
  RetryPolicy p{100ms, 3.0, 1000ms};
  EXPECT_EQ(p.delay_for(0), 100ms);
  EXPECT_EQ(p.delay_for(1), 300ms);
  EXPECT_EQ(p.delay_for(2), 900ms);
  EXPECT_EQ(p.delay_for(3), 1000ms);
  EXPECT_TRUE(is_transient_status(500));
  EXPECT_TRUE(is_transient_status(503));
  EXPECT_TRUE(is_transient_status(429));
  EXPECT_TRUE(is_transient_status(408));
  EXPECT_FALSE(is_transient_status(400));
  EXPECT_FALSE(is_transient_status(404));
}

TEST(EndpointClient, CachesSuccessfulResponses) {
  auto transport = std::make_shared<ScriptedTransport>(std::deque<HttpResponse>{{200, "first"}, {200, "second"}});
  EndpointClient client(config(), transport, nullptr);
  EXPECT_EQ(client.post("chat", "/chat/completions", "{\"a\":1}"), "first");
  EXPECT_EQ(client.post("chat", "/chat/completions", "{\"a\":1}"), "first");
  EXPECT_EQ(transport->calls(), 1);
  EXPECT_EQ(transport->last_url(), "http://judge.local/v1/chat/completions");
  EXPECT_EQ(client.post("chat", "/chat/completions", "{\"a\":2}"), "second");
  EXPECT_EQ(client.upstream_calls(), 2u);
}

TEST(EndpointClient, RetriesTransientFailuresWithBackoff) {
  auto transport =
      std::make_shared<ScriptedTransport>(std::deque<HttpResponse>{{503, ""}, {-1, ""}, {200, "finally"}});
  RecordingSleeper sleeper;
  EndpointClient client(config(2), transport, nullptr, RetryPolicy{10ms, 2.0, 1000ms}, sleeper.fn());
  EXPECT_EQ(client.post("chat", "/x", "{}"), "finally");
  EXPECT_EQ(transport->calls(), 3);
  EXPECT_EQ(*sleeper.delays, (std::vector<std::chrono::milliseconds>{10ms, 20ms}));
}

TEST(EndpointClient, GivesUpAfterRetryBudget) {
  auto transport = std::make_shared<ScriptedTransport>(std::deque<HttpResponse>{{500, ""}, {500, ""}, {500, ""}});
  RecordingSleeper sleeper;
  EndpointClient client(config(1), transport, nullptr, {}, sleeper.fn());
  EXPECT_THROW(client.post("chat", "/x", "{}"), CapabilityUnavailable);
  EXPECT_EQ(transport->calls(), 2);
}

TEST(EndpointClient, FinalStatusIsNotRetried) {
  auto transport = std::make_shared<ScriptedTransport>(std::deque<HttpResponse>{{401, "denied"}});
  RecordingSleeper sleeper;
  EndpointClient client(config(3), transport, nullptr, {}, sleeper.fn());
  EXPECT_THROW(client.post("chat", "/x", "{}"), CapabilityUnavailable);
  EXPECT_EQ(transport->calls(), 1);
  EXPECT_TRUE(sleeper.delays->empty());
}

TEST(EndpointClient, UnusableBodiesAreRetriedAndNeverCached) {
  auto cache = std::make_shared<ResponseCache>();
  auto transport = std::make_shared<ScriptedTransport>(std::deque<HttpResponse>{{200, "garbage"}, {200, "good"}});
  RecordingSleeper sleeper;
  EndpointClient client(config(2), transport, cache, {}, sleeper.fn());
  auto check = [](std::string_view body) { return body == "good"; };
  EXPECT_EQ(client.post("chat", "/x", "{}", check), "good");
  EXPECT_EQ(cache->size(), 1u);
  EXPECT_EQ(*cache->get(cache_key("chat", "m", "{}")), "good");
}

TEST(EndpointClient, SendsBearerTokenFromEnvironmentOnly) {
  auto transport = std::make_shared<ScriptedTransport>();
  ::unsetenv("LECTOR_TEST_KEY");
  EndpointClient client(config(), transport, nullptr);
  client.post("chat", "/x", "{\"n\":1}");
  auto has_auth = [&] {
    for (const auto& [k, v] : transport->last_headers()) {
      if (k == "Authorization") return v;
    }
    return std::string();
  };
  EXPECT_EQ(has_auth(), "");
  ::setenv("LECTOR_TEST_KEY", "s3cret", 1);
  client.post("chat", "/x", "{\"n\":2}");
  EXPECT_EQ(has_auth(), "Bearer s3cret");
  ::unsetenv("LECTOR_TEST_KEY");
}

TEST(EndpointClient, ConcurrencyStaysWithinLimit) {
  auto transport = std::make_shared<ScriptedTransport>(std::deque<HttpResponse>{}, 20ms);
  EndpointClient client(config(0, 2), transport, nullptr);
  std::vector<std::jthread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] { client.post("chat", "/x", "{\"i\":" + std::to_string(i) + "}"); });
  }
  threads.clear();
  EXPECT_EQ(transport->calls(), 8);
  EXPECT_LE(transport->peak(), 2);
  EXPECT_GE(transport->peak(), 1);
}

TEST(EndpointClient, IdenticalConcurrentRequestsShareOneCall) {
  auto transport = std::make_shared<ScriptedTransport>(std::deque<HttpResponse>{{200, "shared"}}, 50ms);
  EndpointClient client(config(0, 4), transport, nullptr);
  std::vector<std::string> results(6);
  {
    std::vector<std::jthread> threads;
    for (int i = 0; i < 6; ++i) threads.emplace_back([&, i] { results[i] = client.post("chat", "/x", "{}"); });
  }
  EXPECT_EQ(transport->calls(), 1);
  for (const auto& r : results) EXPECT_EQ(r, "shared");
}

TEST(ResponseCache, PersistsAcrossInstances) {
  testing::TempDir dir;
  const std::string key = cache_key("chat", "m", "{\"q\":1}");
  {
    ResponseCache cache(dir.path());
    EXPECT_FALSE(cache.get(key));
    cache.put(key, "{\"q\":1}", "answer");
  }
  const auto doc = nlohmann::json::parse(read_file(dir / (key + ".json")));
  EXPECT_EQ(doc.at("response"), "answer");
  EXPECT_EQ(doc.at("request"), "{\"q\":1}");

  ResponseCache reloaded(dir.path());
  EXPECT_EQ(reloaded.get(key), "answer");
  EXPECT_EQ(reloaded.touched_keys(), std::vector<std::string>{key});

  auto transport = std::make_shared<ScriptedTransport>();
  EndpointClient client(config(), transport, std::make_shared<ResponseCache>(dir.path()));
  EXPECT_EQ(client.post("chat", "/x", "{\"q\":1}"), "answer");
  EXPECT_EQ(transport->calls(), 0);
}

TEST(ResponseCache, CorruptEntryIsAMiss) {
  testing::TempDir dir;
  write_file_atomic(dir / "deadbeef.json", "{not json");
  ResponseCache cache(dir.path());
  EXPECT_FALSE(cache.get("deadbeef"));
  cache.put("deadbeef", "{}", "fixed");
  EXPECT_EQ(ResponseCache(dir.path()).get("deadbeef"), "fixed");
}

TEST(ConcurrencyLimiter, RejectsNonPositiveLimit) {
  EXPECT_THROW(ConcurrencyLimiter(0), ConfigurationError);
  ConcurrencyLimiter one(1);
  { ConcurrencyLimiter::Slot slot(one); }
  { ConcurrencyLimiter::Slot slot(one); }
  EXPECT_EQ(one.limit(), 1);
}

}  // namespace
}  // namespace lector
