#include "lector/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <thread>

#include "json.hpp"

namespace lector {

namespace {

constexpr std::string_view kContentSlot = "{Paper Content}";
constexpr std::string_view kGraphSlot = "{Reasoning Logic Graph}";
constexpr std::string_view kCitationSlot = "{Citation List}";

using Slots = std::vector<std::pair<std::string_view, std::string>>;

/// Single-pass literal substitution, so substituted text is never rescanned.
std::string fill_slots(std::string_view tmpl, const Slots& slots, std::string_view template_id) {
  for (const auto& [slot, value] : slots) {
    if (tmpl.find(slot) == std::string_view::npos) {
      throw DataError("template '" + std::string(template_id) + "' has no " + std::string(slot) + " placeholder");
    }
  }
  std::string out;
  out.reserve(tmpl.size());
  for (std::size_t pos = 0; pos < tmpl.size();) {
    auto hit = std::find_if(slots.begin(), slots.end(),
                            [&](const auto& s) { return tmpl.substr(pos, s.first.size()) == s.first; });
    if (hit == slots.end()) {
      out.push_back(tmpl[pos++]);
      continue;
    }
    out += hit->second;
    pos += hit->first.size();
  }
  return out;
}

std::string without_trailing_newlines(std::string s) {
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

bool safe_name(std::string_view s) {
  return !s.empty() && s.front() != '.' && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

bool is_file(const std::filesystem::path& p) {
  std::error_code ec;
  return std::filesystem::is_regular_file(p, ec);
}

}  // namespace

std::string render_extraction_prompt(const PaperRecord& paper, const TemplateStore& templates) {
  return fill_slots(templates.get(kExtractionTemplate), {{kContentSlot, paper.body()}}, kExtractionTemplate);
}

std::string render_writing_prompt(std::string_view graph_dot, std::span<const ReferenceEntry> references,
                                  const TemplateStore& templates, std::vector<std::string>* warnings) {
  if (references.empty() && warnings) warnings->push_back("reference list is empty; the prompt lists no citations");
  return fill_slots(templates.get(kWritingTemplate),
                    {{kGraphSlot, without_trailing_newlines(std::string(graph_dot))},
                     {kCitationSlot, without_trailing_newlines(render_reference_list(references))}},
                    kWritingTemplate);
}

PipelineServices make_services(const RunConfig& config, std::shared_ptr<Transport> transport) {
  PipelineServices s;
  s.templates = std::make_shared<const TemplateStore>(config.template_dir);
  s.cache = std::make_shared<ResponseCache>(config.cache_dir);
  const JudgeOptions options{config.judge_retries};

  if (config.mock) {
    s.generator = std::make_shared<MockGenerationService>();
    s.judges = std::make_shared<JudgeClients>(std::make_shared<MockEmbeddingService>(config.mock_dimension),
                                              std::make_shared<MockNliService>(), nullptr, s.templates, options);
    return s;
  }

  if (!transport) transport = make_http_transport();
  auto client = [&](const EndpointConfig& e) { return std::make_shared<EndpointClient>(e, transport, s.cache); };
  s.generator = std::make_shared<RemoteChatService>(client(config.generation));
  auto nli_chat = std::make_shared<RemoteChatService>(client(config.nli));
  s.judges = std::make_shared<JudgeClients>(std::make_shared<RemoteEmbeddingService>(client(config.embedding)),
                                            std::make_shared<RemoteNliService>(nli_chat, s.templates),
                                            std::make_shared<RemoteChatService>(client(config.judge)), s.templates,
                                            options);
  return s;
}

PaperArtifacts artifacts_for(const std::filesystem::path& out_dir, std::string_view paper_id) {
  PaperArtifacts a;
  a.dir = out_dir / "papers" / std::string(paper_id);
  a.raw_graph = a.dir / "extraction.raw.txt";
  a.graph = a.dir / "graph.dot";
  a.graph_report = a.dir / "graph.report.json";
  a.introduction = a.dir / "introduction.txt";
  return a;
}

// ---------------------------------------------------------------------------
// Pipeline
// ---------------------------------------------------------------------------

Pipeline::Pipeline(RunConfig config, PipelineServices services)
    : config_(std::move(config)), services_(std::move(services)) {
  config_.validate();
  if (!services_.templates || !services_.cache || !services_.generator || !services_.judges) {
    throw ConfigurationError("pipeline services are incomplete");
  }
}

const Corpus& Pipeline::corpus() {
  if (!corpus_) corpus_ = std::make_unique<Corpus>(load_corpus(config_.corpus_dir, config_.manifest));
  return *corpus_;
}

ExtractOutcome Pipeline::extract(std::string_view paper_id) {
  const PaperRecord& paper = corpus().paper(paper_id);
  const PaperArtifacts art = artifacts_for(config_.out_dir, paper.id);

  ExtractOutcome outcome;
  outcome.raw_output = services_.generator->complete(render_extraction_prompt(paper, *services_.templates));
  write_file_atomic(art.raw_graph, outcome.raw_output);

  DotParseResult parsed = parse_dot(outcome.raw_output);
  outcome.parsed = parsed.syntax_ok();
  outcome.report.diagnostics = parsed.diagnostics;
  if (outcome.parsed) {
    auto structural = validate(parsed.graph).diagnostics;
    outcome.report.diagnostics.insert(outcome.report.diagnostics.end(), structural.begin(), structural.end());
    outcome.graph = std::move(parsed.graph);
    write_file_atomic(art.graph, to_dot(outcome.graph));
  } else {
    std::filesystem::remove(art.graph);
  }
  sort_diagnostics(outcome.report.diagnostics);
  write_file_atomic(art.graph_report, outcome.report.to_json());

  if (!outcome.parsed) {
    throw GraphParseFailure("extraction output for '" + paper.id + "' is not a parseable DOT graph: " +
                            outcome.report.diagnostics.front().message);
  }
  return outcome;
}

std::string Pipeline::write(std::string_view paper_id, const std::filesystem::path& graph_path) {
  const PaperRecord& paper = corpus().paper(paper_id);
  const PaperArtifacts art = artifacts_for(config_.out_dir, paper.id);
  const std::filesystem::path source = graph_path.empty() ? art.graph : graph_path;
  if (!is_file(source)) throw DataError("graph file " + source.string() + " does not exist");

  std::vector<std::string> warnings;
  const std::string prompt = render_writing_prompt(read_file(source), paper.references, *services_.templates, &warnings);
  for (const auto& w : warnings) std::clog << "warning: " << paper.id << ": " << w << "\n";
  std::string introduction = services_.generator->complete(prompt);
  write_file_atomic(art.introduction, introduction);
  return introduction;
}

Trajectory Pipeline::load_trajectory(const PaperRecord& paper, bool generate_missing) {
  const PaperArtifacts art = artifacts_for(config_.out_dir, paper.id);
  if (generate_missing) {
    if (!is_file(art.graph) && !is_file(art.raw_graph)) extract(paper.id);
    if (!is_file(art.introduction)) write(paper.id);
  }
  const std::filesystem::path graph = is_file(art.graph) ? art.graph : art.raw_graph;
  if (!is_file(graph) || !is_file(art.introduction)) {
    throw DataError("no trajectory for '" + paper.id + "' under " + art.dir.string() +
                    "; run extract and write first or evaluate with --generate");
  }
  return Trajectory::from_dot(paper.id, read_file(graph), read_file(art.introduction));
}

std::string Pipeline::run_manifest(std::string_view split) const {
  nlohmann::ordered_json j;
  j["system"] = config_.system_name;
  j["split"] = std::string(split);
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : config_.to_map()) config[k] = v;
  j["config"] = std::move(config);
  nlohmann::ordered_json templates = nlohmann::ordered_json::object();
  for (const auto& [id, digest] : services_.templates->digests()) templates[id] = digest;
  j["templates"] = std::move(templates);
  j["cache_keys"] = services_.cache->touched_keys();
  j["papers"] = corpus_ ? corpus_->split(split) : std::vector<std::string>{};
  return j.dump(2) + "\n";
}

EvaluationReport Pipeline::evaluate(std::string_view split, bool generate_missing) {
  if (!safe_name(split)) throw DataError("invalid split name '" + std::string(split) + "'");
  const std::vector<std::string> ids = corpus().split(split);
  if (ids.empty()) throw DataError("split '" + std::string(split) + "' is empty");

  RewardEngine engine(*services_.judges,
                      EngineOptions{config_.keyphrase_k, CoverageOptions{config_.fuzzy_match, config_.fuzzy_threshold}});
  EvaluationReport report;
  report.system = config_.system_name;
  report.split = std::string(split);
  report.rows.resize(ids.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < ids.size(); i = next++) {
      PaperRow& row = report.rows[i];
      row.paper_id = ids[i];
      try {
        const PaperRecord& paper = corpus_->paper(ids[i]);
        row.result = engine.evaluate(load_trajectory(paper, generate_missing), paper, config_.weights);
        row.ok = true;
      } catch (const std::exception& e) {
        row.ok = false;
        row.error = e.what();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(config_.parallelism), ids.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  report.aggregates = aggregate(report.rows);
  const auto dir = config_.out_dir / "evaluation";
  const std::string stem(split);
  write_file_atomic(dir / (stem + ".jsonl"), rows_to_jsonl(report));
  write_file_atomic(dir / (stem + ".summary.json"), summary_to_json(report));
  write_file_atomic(dir / (stem + ".manifest.json"), run_manifest(split));
  if (report.aggregates.evaluated == 0) {
    throw DataError("no paper of split '" + stem + "' could be evaluated: " + report.rows.front().error);
  }
  return report;
}

}  // namespace lector
