#include "lector/reward_engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "lector/citations.hpp"

namespace lector {

namespace {

constexpr std::array<MetricInfo, kMetricCount> kMetrics = {{
    {Metric::kReasoningEdgeAccuracy, "reasoning_edge_accuracy", MetricGroup::kGQ},
    {Metric::kEntityCoverage, "entity_coverage", MetricGroup::kGQ},
    {Metric::kContextualRelevance, "contextual_relevance", MetricGroup::kGW},
    {Metric::kGraphCoverage, "graph_coverage", MetricGroup::kGW},
    {Metric::kKeyphraseFaithfulness, "keyphrase_faithfulness", MetricGroup::kGW},
    {Metric::kEntailmentFaithfulness, "entailment_faithfulness", MetricGroup::kGW},
    {Metric::kLexicalSimilarity, "lexical_similarity", MetricGroup::kPC},
    {Metric::kSemanticSimilarity, "semantic_similarity", MetricGroup::kPC},
    {Metric::kPaperCoverage, "paper_coverage", MetricGroup::kPC},
    {Metric::kKeyphraseConsistency, "keyphrase_consistency", MetricGroup::kPC},
    {Metric::kEntailmentConsistency, "entailment_consistency", MetricGroup::kPC},
    {Metric::kConsistencyWithOriginal, "consistency_with_original", MetricGroup::kWQ},
    {Metric::kCoverageOfKeyPoints, "coverage_of_key_points", MetricGroup::kWQ},
    {Metric::kBackgroundContextQuality, "background_context_quality", MetricGroup::kWQ},
    {Metric::kProblemClarity, "problem_clarity", MetricGroup::kWQ},
    {Metric::kMotivationSignificance, "motivation_significance", MetricGroup::kWQ},
    {Metric::kRelatedWorkPositioning, "related_work_positioning", MetricGroup::kWQ},
    {Metric::kContributionClarity, "contribution_clarity", MetricGroup::kWQ},
    {Metric::kLogicalStructure, "logical_structure", MetricGroup::kWQ},
    {Metric::kCoherenceFlow, "coherence_flow", MetricGroup::kWQ},
    {Metric::kAcademicWritingQuality, "academic_writing_quality", MetricGroup::kWQ},
    {Metric::kPreference, "preference", MetricGroup::kWQ},
    {Metric::kReferenceRecall, "reference_recall", MetricGroup::kCQ},
    {Metric::kReferenceUsageCorrectness, "reference_usage_correctness", MetricGroup::kCQ},
}};

constexpr std::array<Metric, 10> kLikertMetrics = {
    Metric::kConsistencyWithOriginal, Metric::kCoverageOfKeyPoints,    Metric::kBackgroundContextQuality,
    Metric::kProblemClarity,          Metric::kMotivationSignificance, Metric::kRelatedWorkPositioning,
    Metric::kContributionClarity,     Metric::kLogicalStructure,       Metric::kCoherenceFlow,
    Metric::kAcademicWritingQuality,
};

constexpr Scored kUnavailable{0.0, MetricFlag::kUnavailable};

Scored from_verdict(const JudgeVerdict& v) {
  return {v.normalized(), v.parse_failed ? MetricFlag::kParseFailure : MetricFlag::kNone};
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

}  // namespace

std::span<const MetricInfo> metric_table() { return kMetrics; }

const MetricInfo& info(Metric metric) { return kMetrics[static_cast<std::size_t>(metric)]; }

std::string_view to_string(Metric metric) { return info(metric).name; }

std::string_view to_string(MetricGroup group) {
  static constexpr std::array<std::string_view, kGroupCount> kNames = {"GQ", "GW", "PC", "WQ", "CQ"};
  return kNames[static_cast<std::size_t>(group)];
}

std::array<std::size_t, kGroupCount> group_sizes() {
  std::array<std::size_t, kGroupCount> sizes{};
  for (const auto& m : kMetrics) ++sizes[static_cast<std::size_t>(m.group)];
  return sizes;
}

std::span<const Metric> likert_metrics() { return kLikertMetrics; }

std::string judge_template_id(Metric metric) { return "judge/" + std::string(to_string(metric)); }

std::string_view to_string(MetricFlag flag) {
  switch (flag) {
    case MetricFlag::kNone:
      return "none";
    case MetricFlag::kDegenerate:
      return "degenerate";
    case MetricFlag::kUnavailable:
      return "unavailable";
    case MetricFlag::kParseFailure:
      return "parse_failure";
  }
  return "unknown";
}

void MetricVector::set(Metric m, Scored s) { set(m, s.value, s.flag); }

void MetricVector::set(Metric m, double value, MetricFlag flag) {
  if (!std::isfinite(value)) {
    value = 0;
    flag = MetricFlag::kUnavailable;
  }
  values[static_cast<std::size_t>(m)] = std::clamp(value, 0.0, 1.0);
  flags[static_cast<std::size_t>(m)] = flag;
}

std::size_t MetricVector::flagged_count() const {
  return static_cast<std::size_t>(
      std::count_if(flags.begin(), flags.end(), [](MetricFlag f) { return f != MetricFlag::kNone; }));
}

void RewardWeights::validate() const {
  for (double w : values) {
    if (!std::isfinite(w) || w < 0) throw ConfigurationError("reward weights must be finite and nonnegative");
  }
}

RewardBreakdown compose(const MetricVector& metrics, const RewardWeights& weights) {
  weights.validate();
  RewardBreakdown out;
  out.weights = weights;
  const auto sizes = group_sizes();
  double all = 0;
  for (const auto& m : kMetrics) {
    const double v = metrics[m.metric];
    out.groups[static_cast<std::size_t>(m.group)] += v;
    all += v;
  }
  for (std::size_t g = 0; g < kGroupCount; ++g) {
    out.groups[g] /= static_cast<double>(sizes[g]);
    out.total_reward += weights.values[g] * out.groups[g];
  }
  out.op = all / static_cast<double>(kMetricCount);
  return out;
}

// ---------------------------------------------------------------------------
// Trajectory
// ---------------------------------------------------------------------------

Trajectory Trajectory::from_dot(std::string paper_id, std::string_view dot_text, std::string introduction) {
  Trajectory t;
  t.paper_id = std::move(paper_id);
  t.introduction = std::move(introduction);
  DotParseResult parsed = parse_dot(dot_text);
  const bool syntax_ok = parsed.syntax_ok();
  t.validation.diagnostics = std::move(parsed.diagnostics);
  if (syntax_ok) {
    auto structural = validate(parsed.graph).diagnostics;
    t.validation.diagnostics.insert(t.validation.diagnostics.end(), structural.begin(), structural.end());
    t.graph = std::move(parsed.graph);
  }
  sort_diagnostics(t.validation.diagnostics);
  return t;
}

std::string graph_text(const ReasoningGraph& graph) {
  try {
    return linearize(graph);
  } catch (const GraphCycleError&) {
    std::string out;
    for (const auto& n : graph.nodes) {
      if (!out.empty()) out.push_back('\n');
      out += n.transcription;
    }
    return out;
  }
}

Scored summac_score(std::string_view premise_text, std::string_view hypothesis_text, const NliFn& nli) {
  const auto hypotheses = split_sentences(hypothesis_text);
  const auto premises = split_sentences(premise_text);
  if (hypotheses.empty() || premises.empty()) return {0.0, MetricFlag::kDegenerate};
  try {
    double total = 0;
    for (const auto& h : hypotheses) {
      double best = 0;
      for (const auto& p : premises) best = std::max(best, nli(p, h).entail);
      total += best;
    }
    return {total / static_cast<double>(hypotheses.size()), MetricFlag::kNone};
  } catch (const CapabilityUnavailable&) {
    return kUnavailable;
  }
}

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------

RewardEngine::RewardEngine(JudgeClients& clients, EngineOptions options) : clients_(clients), options_(options) {}

std::vector<std::string> RewardEngine::keyphrases(std::string_view text) const {
  return phrase_texts(extract_keyphrases(text, options_.keyphrase_k));
}

Scored RewardEngine::coverage(std::span<const std::string> phrases, std::string_view target) const {
  if (phrases.empty()) return {1.0, MetricFlag::kDegenerate};
  return {phrase_coverage(phrases, target, options_.coverage), MetricFlag::kNone};
}

Scored RewardEngine::cosine(std::string_view a, std::string_view b) {
  if (blank(a) || blank(b)) return {0.0, MetricFlag::kDegenerate};
  try {
    return {cosine01(clients_.embed(a), clients_.embed(b)), MetricFlag::kNone};
  } catch (const CapabilityUnavailable&) {
    return kUnavailable;
  }
}

Scored RewardEngine::summac(std::string_view premise_text, std::string_view hypothesis_text) {
  return summac_score(premise_text, hypothesis_text,
                      [this](std::string_view p, std::string_view h) { return clients_.nli(p, h); });
}

GraphValidityScores RewardEngine::graph_validity(const ReasoningGraph& graph, const ValidationReport&,
                                                 std::string_view reference_intro) {
  GraphValidityScores out;

  if (graph.edges.empty()) {
    out.rea = {0.0, MetricFlag::kDegenerate};
  } else {
    std::size_t supported = 0;
    bool parse_failure = false;
    try {
      for (const auto& e : graph.edges) {
        const GraphNode* premise = graph.find_node(e.src);
        const GraphNode* conclusion = graph.find_node(e.dst);
        if (!premise || !conclusion || blank(premise->transcription) || blank(conclusion->transcription)) continue;
        JudgeVerdict v = clients_.judge_edge(premise->transcription, conclusion->transcription, e.kind);
        parse_failure |= v.parse_failed;
        supported += v.binary ? 1 : 0;
      }
      out.rea = {static_cast<double>(supported) / static_cast<double>(graph.edges.size()),
                 parse_failure ? MetricFlag::kParseFailure : MetricFlag::kNone};
    } catch (const CapabilityUnavailable&) {
      out.rea = kUnavailable;
    }
  }

  std::string transcriptions;
  for (const auto& n : graph.nodes) {
    if (!transcriptions.empty()) transcriptions.push_back('\n');
    transcriptions += n.transcription;
  }
  const auto phrases = keyphrases(reference_intro);
  out.entity_coverage = coverage(phrases, transcriptions);
  return out;
}

FaithfulnessScores RewardEngine::faithfulness(const ReasoningGraph& graph, std::string_view introduction) {
  const std::string linear = graph_text(graph);
  const auto graph_phrases = keyphrases(linear);
  const auto intro_phrases = keyphrases(introduction);
  FaithfulnessScores out;
  out.contextual_relevance = cosine(linear, introduction);
  out.graph_coverage = coverage(graph_phrases, introduction);
  out.keyphrase_faithfulness = coverage(intro_phrases, linear);
  out.entailment_faithfulness = summac(linear, introduction);
  return out;
}

PaperConsistencyScores RewardEngine::paper_consistency(std::string_view introduction,
                                                       std::string_view reference_intro) {
  PaperConsistencyScores out;
  const TokenSeq generated_tokens = tokenize(introduction);
  const TokenSeq reference_tokens = tokenize(reference_intro);
  out.lexical = {bleu(generated_tokens, reference_tokens),
                 generated_tokens.empty() || reference_tokens.empty() ? MetricFlag::kDegenerate : MetricFlag::kNone};
  out.semantic = cosine(introduction, reference_intro);
  const auto reference_phrases = keyphrases(reference_intro);
  const auto generated_phrases = keyphrases(introduction);
  out.paper_coverage = coverage(reference_phrases, introduction);
  out.keyphrase_consistency = coverage(generated_phrases, reference_intro);
  out.entailment_consistency = summac(reference_intro, introduction);
  return out;
}

std::array<Scored, 11> RewardEngine::academic_quality(std::string_view introduction,
                                                      std::string_view reference_intro) {
  const TemplateVars vars{{"reference", std::string(reference_intro)}, {"generated", std::string(introduction)}};
  std::array<Scored, 11> out;
  for (std::size_t i = 0; i < kLikertMetrics.size(); ++i) {
    try {
      out[i] = from_verdict(clients_.judge_likert(judge_template_id(kLikertMetrics[i]), vars));
    } catch (const CapabilityUnavailable&) {
      out[i] = kUnavailable;
    }
  }
  try {
    out[10] = from_verdict(clients_.judge_binary(judge_template_id(Metric::kPreference), vars));
  } catch (const CapabilityUnavailable&) {
    out[10] = kUnavailable;
  }
  return out;
}

ReferenceAlignmentScores RewardEngine::reference_alignment(std::string_view introduction,
                                                           std::string_view reference_intro,
                                                           std::span<const ReferenceEntry> references) {
  ReferenceAlignmentScores out;
  out.recall = {reference_recall(introduction, reference_intro),
                cited_set(reference_intro).empty() ? MetricFlag::kDegenerate : MetricFlag::kNone};

  const auto occurrences = parse_citations(introduction);
  if (occurrences.empty()) {
    out.usage_correctness = {0.0, MetricFlag::kDegenerate};
    return out;
  }
  std::map<int, const ReferenceEntry*> by_index;
  for (const auto& r : references) by_index.emplace(r.index, &r);

  std::size_t appropriate = 0;
  bool parse_failure = false;
  try {
    for (const auto& occ : occurrences) {
      std::vector<ReferenceEntry> cited;
      bool in_range = true;
      for (int index : occ.indices) {
        auto it = by_index.find(index);
        if (it == by_index.end()) {
          in_range = false;
          break;
        }
        cited.push_back(*it->second);
      }
      if (!in_range) continue;
      JudgeVerdict v = clients_.judge_binary(
          "judge/citation_usage", {{"sentence", occ.sentence}, {"cited_references", render_reference_list(cited)}});
      parse_failure |= v.parse_failed;
      appropriate += v.binary ? 1 : 0;
    }
  } catch (const CapabilityUnavailable&) {
    out.usage_correctness = kUnavailable;
    return out;
  }
  out.usage_correctness = {static_cast<double>(appropriate) / static_cast<double>(occurrences.size()),
                           parse_failure ? MetricFlag::kParseFailure : MetricFlag::kNone};
  return out;
}

EvaluationResult RewardEngine::evaluate(const Trajectory& trajectory, const PaperRecord& paper,
                                        const RewardWeights& weights) {
  const std::string_view intro = trajectory.introduction;
  const std::string_view reference = paper.reference_introduction;
  EvaluationResult result;
  result.validation = trajectory.validation;
  MetricVector& m = result.metrics;

  const auto gq = graph_validity(trajectory.graph, trajectory.validation, reference);
  m.set(Metric::kReasoningEdgeAccuracy, gq.rea);
  m.set(Metric::kEntityCoverage, gq.entity_coverage);

  const auto gw = faithfulness(trajectory.graph, intro);
  m.set(Metric::kContextualRelevance, gw.contextual_relevance);
  m.set(Metric::kGraphCoverage, gw.graph_coverage);
  m.set(Metric::kKeyphraseFaithfulness, gw.keyphrase_faithfulness);
  m.set(Metric::kEntailmentFaithfulness, gw.entailment_faithfulness);

  const auto pc = paper_consistency(intro, reference);
  m.set(Metric::kLexicalSimilarity, pc.lexical);
  m.set(Metric::kSemanticSimilarity, pc.semantic);
  m.set(Metric::kPaperCoverage, pc.paper_coverage);
  m.set(Metric::kKeyphraseConsistency, pc.keyphrase_consistency);
  m.set(Metric::kEntailmentConsistency, pc.entailment_consistency);

  const auto wq = academic_quality(intro, reference);
  for (std::size_t i = 0; i < wq.size(); ++i) {
    m.set(static_cast<Metric>(static_cast<std::size_t>(Metric::kConsistencyWithOriginal) + i), wq[i]);
  }

  const auto cq = reference_alignment(intro, reference, paper.references);
  m.set(Metric::kReferenceRecall, cq.recall);
  m.set(Metric::kReferenceUsageCorrectness, cq.usage_correctness);

  result.reward = compose(m, weights);
  return result;
}

}  // namespace lector
