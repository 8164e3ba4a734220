#include "lector/judge_clients.hpp"

#include <cctype>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace lector {

namespace {

using json = nlohmann::json;

constexpr std::string_view kLikertReminder =
    "Reminder: the final line of your answer must contain only a single integer from 1 to 5.";
constexpr std::string_view kYesNoReminder = "Reminder: the final line of your answer must contain only YES or NO.";

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string chat_content(std::string_view body) {
  auto doc = json::parse(body);
  return doc.at("choices").at(0).at("message").at("content").get<std::string>();
}

std::vector<double> embedding_values(std::string_view body) {
  auto doc = json::parse(body);
  auto values = doc.at("data").at(0).at("embedding").get<std::vector<double>>();
  if (values.empty()) throw DataError("empty embedding");
  for (double v : values) {
    if (!std::isfinite(v)) throw DataError("non-finite embedding component");
  }
  return values;
}

void normalize_in_place(std::vector<double>& values) {
  double norm = 0;
  for (double v : values) norm += v * v;
  norm = std::sqrt(norm);
  if (norm == 0) throw CapabilityUnavailable("zero-length embedding");
  for (double& v : values) v /= norm;
}

}  // namespace

NliProbs normalize(NliProbs p) {
  for (double* v : {&p.entail, &p.neutral, &p.contradict}) {
    if (!std::isfinite(*v)) throw CapabilityUnavailable("non-finite NLI probability");
    *v = std::max(*v, 0.0);
  }
  const double sum = p.entail + p.neutral + p.contradict;
  if (sum <= 0) throw CapabilityUnavailable("NLI probabilities sum to zero");
  return {p.entail / sum, p.neutral / sum, p.contradict / sum};
}

double JudgeVerdict::normalized() const {
  if (kind == VerdictKind::kLikert) return (static_cast<double>(likert) - 1.0) / 4.0;
  return binary ? 1.0 : 0.0;
}

std::optional<int> parse_likert(std::string_view response) {
  for (std::size_t i = 0; i < response.size();) {
    if (!std::isdigit(static_cast<unsigned char>(response[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < response.size() && std::isdigit(static_cast<unsigned char>(response[j]))) ++j;
    if (j - i == 1 && response[i] >= '1' && response[i] <= '5') return response[i] - '0';
    i = j;
  }
  return std::nullopt;
}

std::optional<bool> parse_yes_no(std::string_view response) {
  for (std::size_t i = 0; i < response.size();) {
    if (!std::isalpha(static_cast<unsigned char>(response[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < response.size() && is_word_char(response[j])) ++j;
    const std::string word = lower(response.substr(i, j - i));
    if (word == "yes") return true;
    if (word == "no") return false;
    i = j;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Remote services
// ---------------------------------------------------------------------------

RemoteEmbeddingService::RemoteEmbeddingService(std::shared_ptr<EndpointClient> client) : client_(std::move(client)) {}

Embedding RemoteEmbeddingService::embed(std::string_view text) {
  json payload = {{"model", client_->config().model_name}, {"input", std::string(text)}};
  const std::string body = client_->post("embed", "/embeddings", payload.dump(), [](std::string_view b) {
    embedding_values(b);
    return true;
  });
  Embedding e{embedding_values(body)};
  normalize_in_place(e.values);

  std::lock_guard lock(mutex_);
  if (!dimension_) {
    dimension_ = e.dimension();
  } else if (*dimension_ != e.dimension()) {
    throw ConfigurationError("embedding dimension changed from " + std::to_string(*dimension_) + " to " +
                             std::to_string(e.dimension()));
  }
  return e;
}

RemoteChatService::RemoteChatService(std::shared_ptr<EndpointClient> client) : client_(std::move(client)) {}

std::string RemoteChatService::complete(std::string_view prompt) { return complete_checked(prompt, {}); }

std::string RemoteChatService::complete_checked(std::string_view prompt,
                                                const std::function<bool(std::string_view)>& check) {
  json payload = {{"model", client_->config().model_name},
                  {"messages", json::array({{{"role", "user"}, {"content", std::string(prompt)}}})},
                  {"temperature", 0}};
  const std::string body = client_->post("chat", "/chat/completions", payload.dump(), [&](std::string_view b) {
    const std::string content = chat_content(b);
    return !check || check(content);
  });
  return chat_content(body);
}

NliProbs parse_nli_response(std::string_view text) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open == std::string_view::npos || close == std::string_view::npos || close < open) {
    throw CapabilityUnavailable("NLI response contains no JSON object");
  }
  try {
    auto doc = json::parse(text.substr(open, close - open + 1));
    NliProbs p{doc.at("entailment").get<double>(), doc.at("neutral").get<double>(),
               doc.at("contradiction").get<double>()};
    return normalize(p);
  } catch (const json::exception& e) {
    throw CapabilityUnavailable(std::string("malformed NLI response: ") + e.what());
  }
}

RemoteNliService::RemoteNliService(std::shared_ptr<RemoteChatService> chat,
                                   std::shared_ptr<const TemplateStore> templates)
    : chat_(std::move(chat)), templates_(std::move(templates)) {}

NliProbs RemoteNliService::nli(std::string_view premise, std::string_view hypothesis) {
  const std::string prompt = render_template(
      templates_->get("judge/nli"), {{"premise", std::string(premise)}, {"hypothesis", std::string(hypothesis)}});
  const std::string answer = chat_->complete_checked(prompt, [](std::string_view t) {
    parse_nli_response(t);
    return true;
  });
  return parse_nli_response(answer);
}

// ---------------------------------------------------------------------------
// Facade
// ---------------------------------------------------------------------------

JudgeClients::JudgeClients(std::shared_ptr<EmbeddingService> embedding, std::shared_ptr<NliService> nli,
                           std::shared_ptr<ChatService> judge_chat, std::shared_ptr<const TemplateStore> templates,
                           JudgeOptions options)
    : embedding_(std::move(embedding)),
      nli_(std::move(nli)),
      judge_chat_(std::move(judge_chat)),
      templates_(templates ? std::move(templates) : std::make_shared<const TemplateStore>()),
      options_(options) {
  if (!embedding_ || !nli_) throw ConfigurationError("judge clients need embedding and NLI services");
  if (options_.max_retries < 0) throw ConfigurationError("judge max_retries must be >= 0");
}

JudgeClients JudgeClients::mock(std::size_t dimension, std::shared_ptr<const TemplateStore> templates) {
  return JudgeClients(std::make_shared<MockEmbeddingService>(dimension), std::make_shared<MockNliService>(),
                      nullptr, std::move(templates));
}

Embedding JudgeClients::embed(std::string_view text) {
  if (text.empty()) throw std::invalid_argument("embed: empty text");
  return embedding_->embed(text);
}

NliProbs JudgeClients::nli(std::string_view premise, std::string_view hypothesis) {
  if (premise.empty() || hypothesis.empty()) throw std::invalid_argument("nli: empty sentence");
  return normalize(nli_->nli(premise, hypothesis));
}

JudgeVerdict JudgeClients::ask(VerdictKind kind, const std::string& prompt) {
  JudgeVerdict verdict;
  verdict.kind = kind;
  if (is_mock_judge()) {
    verdict.attempts = 1;
    if (kind == VerdictKind::kLikert) {
      verdict.likert = mock_likert(prompt);
      verdict.raw = std::to_string(verdict.likert);
    } else {
      verdict.binary = mock_binary(prompt);
      verdict.raw = verdict.binary ? "YES" : "NO";
    }
    return verdict;
  }

  const std::string_view reminder = kind == VerdictKind::kLikert ? kLikertReminder : kYesNoReminder;
  for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
    std::string text = prompt;
    if (attempt > 0) text += "\n\n(Attempt " + std::to_string(attempt + 1) + ") " + std::string(reminder);
    verdict.raw = judge_chat_->complete(text);
    verdict.attempts = attempt + 1;
    if (kind == VerdictKind::kLikert) {
      if (auto v = parse_likert(verdict.raw)) {
        verdict.likert = *v;
        return verdict;
      }
    } else if (auto v = parse_yes_no(verdict.raw)) {
      verdict.binary = *v;
      return verdict;
    }
  }
  verdict.parse_failed = true;
  verdict.likert = kind == VerdictKind::kLikert ? 1 : 0;
  verdict.binary = false;
  return verdict;
}

JudgeVerdict JudgeClients::judge_likert(std::string_view template_id, const TemplateVars& vars) {
  return ask(VerdictKind::kLikert, render_template(templates_->get(template_id), vars));
}

JudgeVerdict JudgeClients::judge_binary(std::string_view template_id, const TemplateVars& vars) {
  return ask(VerdictKind::kBinary, render_template(templates_->get(template_id), vars));
}

JudgeVerdict JudgeClients::judge_edge(std::string_view premise, std::string_view conclusion, EdgeKind kind) {
  if (premise.empty() || conclusion.empty()) throw std::invalid_argument("judge_edge: empty text");
  std::string key(premise);
  key.push_back('\0');
  key.append(conclusion);
  key.push_back('\0');
  key.append(to_string(kind));
  {
    std::lock_guard lock(edge_mutex_);
    if (auto it = edge_cache_.find(key); it != edge_cache_.end()) return it->second;
  }

  JudgeVerdict verdict;
  if (is_mock_judge()) {
    verdict.kind = VerdictKind::kEdgeCheck;
    verdict.binary = mock_edge(premise, conclusion);
    verdict.raw = verdict.binary ? "YES" : "NO";
    verdict.attempts = 1;
  } else {
    const TemplateVars vars{{"paradigm", std::string(to_string(paradigm_of(kind)))},
                            {"role", std::string(role_description(kind))},
                            {"premise", std::string(premise)},
                            {"conclusion", std::string(conclusion)}};
    verdict = ask(VerdictKind::kEdgeCheck, render_template(templates_->get("judge/edge_check"), vars));
  }

  std::lock_guard lock(edge_mutex_);
  edge_cache_.emplace(std::move(key), verdict);
  return verdict;
}

}  // namespace lector
