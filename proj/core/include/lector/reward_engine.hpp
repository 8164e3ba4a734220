#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>

#include "lector/corpus.hpp"
#include "lector/judge_clients.hpp"
#include "lector/reasoning_graph.hpp"
#include "lector/text_metrics.hpp"

namespace lector {

// ---------------------------------------------------------------------------
// Metric enumeration
// ---------------------------------------------------------------------------

enum class MetricGroup { kGQ, kGW, kPC, kWQ, kCQ };

inline constexpr std::size_t kGroupCount = 5;
inline constexpr std::size_t kMetricCount = 24;

/// Declaration order is the canonical report order; members of one group are
/// contiguous.
enum class Metric {
  // Graph quality
  kReasoningEdgeAccuracy,
  kEntityCoverage,
  // Graph-writing alignment
  kContextualRelevance,
  kGraphCoverage,
  kKeyphraseFaithfulness,
  kEntailmentFaithfulness,
  // Paper consistency
  kLexicalSimilarity,
  kSemanticSimilarity,
  kPaperCoverage,
  kKeyphraseConsistency,
  kEntailmentConsistency,
  // Writing quality
  kConsistencyWithOriginal,
  kCoverageOfKeyPoints,
  kBackgroundContextQuality,
  kProblemClarity,
  kMotivationSignificance,
  kRelatedWorkPositioning,
  kContributionClarity,
  kLogicalStructure,
  kCoherenceFlow,
  kAcademicWritingQuality,
  kPreference,
  // Citation quality
  kReferenceRecall,
  kReferenceUsageCorrectness,
};

struct MetricInfo {
  Metric metric;
  std::string_view name;  // snake_case report key
  MetricGroup group;
};

std::span<const MetricInfo> metric_table();
const MetricInfo& info(Metric metric);
std::string_view to_string(Metric metric);
/// "GQ", "GW", "PC", "WQ", "CQ".
std::string_view to_string(MetricGroup group);
std::array<std::size_t, kGroupCount> group_sizes();

/// The ten Likert-scored writing-quality metrics, in enumeration order.
std::span<const Metric> likert_metrics();

/// Judge template id ("judge/<name>") for a writing-quality metric.
std::string judge_template_id(Metric metric);

// ---------------------------------------------------------------------------
// Values
// ---------------------------------------------------------------------------

enum class MetricFlag : std::uint8_t {
  kNone,
  kDegenerate,    // value fixed by an empty-input rule
  kUnavailable,   // an external capability failed; value forced to 0
  kParseFailure,  // judge never produced a parseable answer
};

std::string_view to_string(MetricFlag flag);

struct Scored {
  double value = 0;
  MetricFlag flag = MetricFlag::kNone;
};

struct MetricVector {
  std::array<double, kMetricCount> values{};
  std::array<MetricFlag, kMetricCount> flags{};

  double operator[](Metric m) const { return values[static_cast<std::size_t>(m)]; }
  MetricFlag flag(Metric m) const { return flags[static_cast<std::size_t>(m)]; }
  void set(Metric m, Scored s);
  void set(Metric m, double value, MetricFlag flag = MetricFlag::kNone);
  std::size_t flagged_count() const;
};

struct RewardWeights {
  std::array<double, kGroupCount> values{1.0, 1.0, 1.0, 1.0, 1.0};

  /// Throws ConfigurationError on negative or non-finite weights.
  void validate() const;
};

struct RewardBreakdown {
  std::array<double, kGroupCount> groups{};  // gq, gw, pc, wq, cq
  double op = 0;
  double total_reward = 0;
  RewardWeights weights;

  double group(MetricGroup g) const { return groups[static_cast<std::size_t>(g)]; }
};

/// Group means, OP (mean of all 24) and the weighted group sum.
RewardBreakdown compose(const MetricVector& metrics, const RewardWeights& weights = {});

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

struct Trajectory {
  std::string paper_id;
  ReasoningGraph graph;
  ValidationReport validation;
  std::string introduction;

  /// Parses and validates raw extraction output. An unparseable graph yields
  /// an empty graph whose report carries the parse diagnostics.
  static Trajectory from_dot(std::string paper_id, std::string_view dot_text, std::string introduction);
};

struct GraphValidityScores {
  Scored rea;
  Scored entity_coverage;
};

struct FaithfulnessScores {
  Scored contextual_relevance;
  Scored graph_coverage;
  Scored keyphrase_faithfulness;
  Scored entailment_faithfulness;
};

struct PaperConsistencyScores {
  Scored lexical;
  Scored semantic;
  Scored paper_coverage;
  Scored keyphrase_consistency;
  Scored entailment_consistency;
};

struct ReferenceAlignmentScores {
  Scored recall;
  Scored usage_correctness;
};

struct EvaluationResult {
  MetricVector metrics;
  RewardBreakdown reward;
  ValidationReport validation;
};

using NliFn = std::function<NliProbs(std::string_view premise, std::string_view hypothesis)>;

/// Zero-shot SummaC: mean over hypothesis sentences of the best entailment
/// probability across premise sentences. Empty hypothesis -> 0 (degenerate);
/// NLI failure -> 0 (unavailable).
Scored summac_score(std::string_view premise_text, std::string_view hypothesis_text, const NliFn& nli);

struct EngineOptions {
  std::size_t keyphrase_k = kDefaultKeyphraseCount;
  CoverageOptions coverage;
};

/// Computes every sub-metric for one trajectory. Stateless apart from the
/// shared clients, so one engine may serve concurrent evaluations.
class RewardEngine {
 public:
  explicit RewardEngine(JudgeClients& clients, EngineOptions options = {});

  GraphValidityScores graph_validity(const ReasoningGraph& graph, const ValidationReport& validation,
                                     std::string_view reference_intro);
  FaithfulnessScores faithfulness(const ReasoningGraph& graph, std::string_view introduction);
  Scored summac(std::string_view premise_text, std::string_view hypothesis_text);
  PaperConsistencyScores paper_consistency(std::string_view introduction, std::string_view reference_intro);
  /// Ten Likert metrics followed by the binary preference.
  std::array<Scored, 11> academic_quality(std::string_view introduction, std::string_view reference_intro);
  ReferenceAlignmentScores reference_alignment(std::string_view introduction, std::string_view reference_intro,
                                               std::span<const ReferenceEntry> references);

  EvaluationResult evaluate(const Trajectory& trajectory, const PaperRecord& paper,
                            const RewardWeights& weights = {});

 private:
  std::vector<std::string> keyphrases(std::string_view text) const;
  Scored coverage(std::span<const std::string> phrases, std::string_view target) const;
  Scored cosine(std::string_view a, std::string_view b);

  JudgeClients& clients_;
  EngineOptions options_;
};

/// Graph text used by the alignment metrics: the linearization, or the
/// transcriptions in stored order when the graph is cyclic.
std::string graph_text(const ReasoningGraph& graph);

}  // namespace lector
