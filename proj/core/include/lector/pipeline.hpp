#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lector/corpus.hpp"
#include "lector/judge_clients.hpp"
#include "lector/prompts.hpp"
#include "lector/reasoning_graph.hpp"
#include "lector/report.hpp"
#include "lector/run_config.hpp"

namespace lector {

inline constexpr std::string_view kExtractionTemplate = "prompts/extraction";
inline constexpr std::string_view kWritingTemplate = "prompts/writing";

/// Extraction prompt with methods, results and analyses substituted for
/// "{Paper Content}". References are never included.
std::string render_extraction_prompt(const PaperRecord& paper, const TemplateStore& templates);

/// Writing prompt with the DOT source at "{Reasoning Logic Graph}" and the
/// numbered reference list at "{Citation List}". Appends a warning when the
/// reference list is empty.
std::string render_writing_prompt(std::string_view graph_dot, std::span<const ReferenceEntry> references,
                                  const TemplateStore& templates, std::vector<std::string>* warnings = nullptr);

/// Offline stand-in for the generation endpoint. Extraction prompts yield a
/// fenced chain-shaped DOT graph built from the body's sentences; writing
/// prompts yield the graph's linearization with citation markers for the
/// first listed references.
class MockGenerationService final : public ChatService {
 public:
  std::string complete(std::string_view prompt) override;
};

struct PipelineServices {
  std::shared_ptr<const TemplateStore> templates;
  std::shared_ptr<ResponseCache> cache;
  std::shared_ptr<ChatService> generator;
  std::shared_ptr<JudgeClients> judges;
};

/// Mock services when `config.mock`, otherwise endpoint-backed ones sharing
/// `transport` (cpp-httplib when null).
PipelineServices make_services(const RunConfig& config, std::shared_ptr<Transport> transport = nullptr);

/// Raised by `extract` when the model output could not be parsed. Artifacts
/// are already persisted when it is thrown.
class GraphParseFailure : public Error {
 public:
  using Error::Error;
};

struct ExtractOutcome {
  std::string raw_output;
  ReasoningGraph graph;
  ValidationReport report;
  bool parsed = false;
};

/// Artifact layout under `<out_dir>/papers/<id>/`.
struct PaperArtifacts {
  std::filesystem::path dir;
  std::filesystem::path raw_graph;     // extraction.raw.txt
  std::filesystem::path graph;         // graph.dot (canonical)
  std::filesystem::path graph_report;  // graph.report.json
  std::filesystem::path introduction;  // introduction.txt
};

PaperArtifacts artifacts_for(const std::filesystem::path& out_dir, std::string_view paper_id);

class Pipeline {
 public:
  Pipeline(RunConfig config, PipelineServices services);

  /// Calls the generator with the extraction prompt and persists the raw
  /// output, the canonical graph (when parsed) and the validation report.
  ExtractOutcome extract(std::string_view paper_id);

  /// Writes the introduction for `paper_id` from the graph file at
  /// `graph_path` (defaults to the extracted graph). Throws DataError when the
  /// graph file is missing.
  std::string write(std::string_view paper_id, const std::filesystem::path& graph_path = {});

  /// Evaluates every paper of `split` with bounded parallelism, writing
  /// `<out_dir>/evaluation/<split>.jsonl`, `<split>.summary.json` and
  /// `<split>.manifest.json`. Throws DataError for an empty split or when no
  /// paper could be evaluated.
  EvaluationReport evaluate(std::string_view split, bool generate_missing = false);

  const Corpus& corpus();
  const RunConfig& config() const { return config_; }

 private:
  Trajectory load_trajectory(const PaperRecord& paper, bool generate_missing);
  std::string run_manifest(std::string_view split) const;

  RunConfig config_;
  PipelineServices services_;
  std::unique_ptr<Corpus> corpus_;
};

}  // namespace lector
