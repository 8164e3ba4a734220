#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "lector/endpoint.hpp"
#include "lector/prompts.hpp"
#include "lector/reasoning_graph.hpp"
#include "lector/text_metrics.hpp"

namespace lector {

struct NliProbs {
  double entail = 0;
  double neutral = 0;
  double contradict = 0;
};

/// Clamps negatives to 0 and rescales to sum 1. Throws CapabilityUnavailable
/// when nothing positive remains or a value is not finite.
NliProbs normalize(NliProbs probs);

enum class VerdictKind { kLikert, kBinary, kEdgeCheck };

struct JudgeVerdict {
  VerdictKind kind = VerdictKind::kLikert;
  int likert = 0;       // 1..5 for kLikert
  bool binary = false;  // for kBinary / kEdgeCheck
  std::string raw;      // last response text
  int attempts = 0;
  /// Set when no attempt produced a parseable answer; the value is then the
  /// conservative default (likert 1, binary false).
  bool parse_failed = false;

  /// Likert mapped to [0,1] by (v - 1) / 4, booleans to {0, 1}.
  double normalized() const;
};

/// First integer in 1..5 appearing in the response.
std::optional<int> parse_likert(std::string_view response);

/// First standalone YES or NO word, case-insensitive.
std::optional<bool> parse_yes_no(std::string_view response);

// ---------------------------------------------------------------------------
// Capabilities
// ---------------------------------------------------------------------------

class EmbeddingService {
 public:
  virtual ~EmbeddingService() = default;
  virtual Embedding embed(std::string_view text) = 0;
};

class NliService {
 public:
  virtual ~NliService() = default;
  virtual NliProbs nli(std::string_view premise, std::string_view hypothesis) = 0;
};

class ChatService {
 public:
  virtual ~ChatService() = default;
  /// Single user-turn completion; returns the assistant message text.
  virtual std::string complete(std::string_view prompt) = 0;
};

/// POST {base_url}/embeddings; returns the unit-normalized vector.
class RemoteEmbeddingService final : public EmbeddingService {
 public:
  explicit RemoteEmbeddingService(std::shared_ptr<EndpointClient> client);
  Embedding embed(std::string_view text) override;

 private:
  std::shared_ptr<EndpointClient> client_;
  std::mutex mutex_;
  std::optional<std::size_t> dimension_;
};

/// POST {base_url}/chat/completions with temperature 0.
class RemoteChatService final : public ChatService {
 public:
  explicit RemoteChatService(std::shared_ptr<EndpointClient> client);
  std::string complete(std::string_view prompt) override;

  /// Same, but the assistant text must satisfy `check` or the call is retried.
  std::string complete_checked(std::string_view prompt,
                               const std::function<bool(std::string_view)>& check);

 private:
  std::shared_ptr<EndpointClient> client_;
};

/// Three-way NLI served through a chat endpoint using the "judge/nli" template;
/// the model answers with a JSON object of probabilities.
class RemoteNliService final : public NliService {
 public:
  RemoteNliService(std::shared_ptr<RemoteChatService> chat, std::shared_ptr<const TemplateStore> templates);
  NliProbs nli(std::string_view premise, std::string_view hypothesis) override;

 private:
  std::shared_ptr<RemoteChatService> chat_;
  std::shared_ptr<const TemplateStore> templates_;
};

/// Parses {"entailment": x, "neutral": y, "contradiction": z} (possibly inside
/// surrounding text). Throws CapabilityUnavailable when malformed.
NliProbs parse_nli_response(std::string_view text);

// ---------------------------------------------------------------------------
// Offline mock rules
// ---------------------------------------------------------------------------

inline constexpr std::size_t kDefaultMockDimension = 64;

/// Unit vector whose components come from std::mt19937_64 seeded with the
/// first 8 bytes (big-endian) of SHA-256(text); component i is
/// (draw >> 11) * 2^-53 * 2 - 1 before normalization.
Embedding mock_embedding(std::string_view text, std::size_t dimension = kDefaultMockDimension);

/// entail = r, neutral = 0.75 (1 - r), contradict = 0.25 (1 - r) with
/// r = overlap_ratio(premise, hypothesis).
NliProbs mock_nli(std::string_view premise, std::string_view hypothesis);

/// 1 + (first byte of SHA-256(prompt)) mod 5.
int mock_likert(std::string_view rendered_prompt);

/// True when the first byte of SHA-256(prompt) is even.
bool mock_binary(std::string_view rendered_prompt);

/// True when overlap_ratio(premise, conclusion) >= 0.2.
bool mock_edge(std::string_view premise, std::string_view conclusion);

class MockEmbeddingService final : public EmbeddingService {
 public:
  explicit MockEmbeddingService(std::size_t dimension = kDefaultMockDimension) : dimension_(dimension) {}
  Embedding embed(std::string_view text) override;

 private:
  std::size_t dimension_;
};

class MockNliService final : public NliService {
 public:
  NliProbs nli(std::string_view premise, std::string_view hypothesis) override;
};

// ---------------------------------------------------------------------------
// Facade
// ---------------------------------------------------------------------------

struct JudgeOptions {
  int max_retries = 2;  // re-prompts after an unparseable judge answer
};

/// The three external capabilities the rewards need. A null judge chat
/// selects the offline mock judge rules.
class JudgeClients {
 public:
  JudgeClients(std::shared_ptr<EmbeddingService> embedding, std::shared_ptr<NliService> nli,
               std::shared_ptr<ChatService> judge_chat, std::shared_ptr<const TemplateStore> templates,
               JudgeOptions options = {});

  static JudgeClients mock(std::size_t dimension = kDefaultMockDimension,
                           std::shared_ptr<const TemplateStore> templates = nullptr);

  /// Throws std::invalid_argument on empty text.
  Embedding embed(std::string_view text);
  NliProbs nli(std::string_view premise, std::string_view hypothesis);

  JudgeVerdict judge_likert(std::string_view template_id, const TemplateVars& vars);
  JudgeVerdict judge_binary(std::string_view template_id, const TemplateVars& vars);
  JudgeVerdict judge_edge(std::string_view premise, std::string_view conclusion, EdgeKind kind);

  bool is_mock_judge() const { return judge_chat_ == nullptr; }
  const TemplateStore& templates() const { return *templates_; }

 private:
  JudgeVerdict ask(VerdictKind kind, const std::string& prompt);

  std::shared_ptr<EmbeddingService> embedding_;
  std::shared_ptr<NliService> nli_;
  std::shared_ptr<ChatService> judge_chat_;
  std::shared_ptr<const TemplateStore> templates_;
  JudgeOptions options_;

  std::mutex edge_mutex_;
  std::map<std::string, JudgeVerdict> edge_cache_;
};

}  // namespace lector
