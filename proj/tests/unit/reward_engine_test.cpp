#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "lector/reward_engine.hpp"

namespace lector {
namespace {

// Fake NLI that reads entailment from a matrix indexed by sentence text.
NliFn matrix_nli(const std::vector<std::string>& premises, const std::vector<std::string>& hypotheses,
                 const std::vector<std::vector<double>>& entail) {
  return [=](std::string_view p, std::string_view h) {
    auto pi = std::find(premises.begin(), premises.end(), p) - premises.begin();
    auto hi = std::find(hypotheses.begin(), hypotheses.end(), h) - hypotheses.begin();
    const double e = entail.at(static_cast<std::size_t>(hi)).at(static_cast<std::size_t>(pi));
    return NliProbs{e, (1 - e) / 2, (1 - e) / 2};
  };
}

std::string join(const std::vector<std::string>& sentences) {
  std::string out;
  for (const auto& s : sentences) out += (out.empty() ? "" : " ") + s;
  return out;
}

TEST(MetricTable, GroupSizesAndNames) {
  EXPECT_EQ(group_sizes(), (std::array<std::size_t, kGroupCount>{2, 4, 5, 11, 2}));
  EXPECT_EQ(metric_table().size(), kMetricCount);
  EXPECT_EQ(likert_metrics().size(), 10u);
  EXPECT_EQ(to_string(Metric::kReasoningEdgeAccuracy), "reasoning_edge_accuracy");
  EXPECT_EQ(to_string(Metric::kReferenceUsageCorrectness), "reference_usage_correctness");
  EXPECT_EQ(to_string(MetricGroup::kWQ), "WQ");
  EXPECT_EQ(judge_template_id(Metric::kProblemClarity), "judge/problem_clarity");
  EXPECT_EQ(judge_template_id(Metric::kPreference), "judge/preference");
  for (std::size_t i = 0; i < kMetricCount; ++i) EXPECT_EQ(metric_table()[i].metric, static_cast<Metric>(i));
}

TEST(Compose, ExactArithmeticWithInjectedMetrics) {
  MetricVector m;
  for (std::size_t i = 0; i < kMetricCount; ++i) m.values[i] = static_cast<double>(i + 1) / 32.0;
  const RewardBreakdown r = compose(m);

  auto mean = [&](std::size_t lo, std::size_t n) {
    double s = 0;
    for (std::size_t i = lo; i < lo + n; ++i) s += m.values[i];
    return s / static_cast<double>(n);
  };
  const std::array<double, 5> expected{mean(0, 2), mean(2, 4), mean(6, 5), mean(11, 11), mean(22, 2)};
  for (std::size_t g = 0; g < kGroupCount; ++g) EXPECT_NEAR(r.groups[g], expected[g], 1e-12) << g;
  EXPECT_NEAR(r.op, mean(0, 24), 1e-12);
  EXPECT_NEAR(r.op, 300.0 / 32.0 / 24.0, 1e-12);
  EXPECT_NEAR(r.total_reward, std::accumulate(expected.begin(), expected.end(), 0.0), 1e-12);
}

TEST(Compose, BoundsAndWeights) {
  MetricVector ones;
  ones.values.fill(1.0);
  EXPECT_NEAR(compose(ones).total_reward, 5.0, 1e-12);
  EXPECT_NEAR(compose(ones).op, 1.0, 1e-12);
  EXPECT_EQ(compose(MetricVector{}).total_reward, 0.0);

  RewardWeights w;
  w.values = {2, 0, 0, 0, 0.5};
  const RewardBreakdown r = compose(ones, w);
  EXPECT_NEAR(r.total_reward, 2.5, 1e-12);

  w.values[1] = -1;
  EXPECT_THROW(compose(ones, w), ConfigurationError);
  w.values[1] = NAN;
  EXPECT_THROW(compose(ones, w), ConfigurationError);
}

TEST(MetricVector, ClampsAndFlagsNonFinite) {
  MetricVector m;
  m.set(Metric::kGraphCoverage, 1.5);
  m.set(Metric::kPaperCoverage, -0.5);
  m.set(Metric::kLexicalSimilarity, NAN);
  EXPECT_EQ(m[Metric::kGraphCoverage], 1.0);
  EXPECT_EQ(m[Metric::kPaperCoverage], 0.0);
  EXPECT_EQ(m[Metric::kLexicalSimilarity], 0.0);
  EXPECT_EQ(m.flag(Metric::kLexicalSimilarity), MetricFlag::kUnavailable);
  EXPECT_EQ(m.flagged_count(), 1u);
}

struct SummacCase {
  std::vector<std::string> premises;
  std::vector<std::string> hypotheses;
  std::vector<std::vector<double>> entail;  // [hypothesis][premise]
  double expected;
};

TEST(Summac, MeanOfRowMaxima) {
  const std::vector<SummacCase> cases = {
      {{"P one.", "P two."}, {"H one."}, {{0.9, 0.4}}, 0.9},
      {{"P one."}, {"H one.", "H two."}, {{1.0}, {0.0}}, 0.5},
      {{"P one.", "P two.", "P three."},
       {"H one.", "H two.", "H three."},
       {{0.1, 0.2, 0.3}, {0.6, 0.5, 0.4}, {0.25, 0.75, 0.5}},
       (0.3 + 0.6 + 0.75) / 3.0},
      {{"P one.", "P two."},
       {"H one.", "H two.", "H three.", "H four."},
       {{0.125, 0.0625}, {0.0, 0.0}, {0.333, 0.334}, {1.0, 1.0}},
       (0.125 + 0.0 + 0.334 + 1.0) / 4.0},
      {{"Only."}, {"Single."}, {{0.123456789}}, 0.123456789},
  };
  for (const auto& c : cases) {
    const Scored s = summac_score(join(c.premises), join(c.hypotheses), matrix_nli(c.premises, c.hypotheses, c.entail));
    EXPECT_NEAR(s.value, c.expected, 1e-12);
    EXPECT_EQ(s.flag, MetricFlag::kNone);
  }
}

TEST(Summac, DegenerateAndUnavailable) {
  auto never = [](std::string_view, std::string_view) -> NliProbs {
    ADD_FAILURE() << "NLI must not be called";
    return {};
  };
  const Scored empty = summac_score("A premise.", "", never);
  EXPECT_EQ(empty.value, 0.0);
  EXPECT_EQ(empty.flag, MetricFlag::kDegenerate);
  EXPECT_EQ(summac_score("", "A hypothesis.", never).flag, MetricFlag::kDegenerate);

  auto failing = [](std::string_view, std::string_view) -> NliProbs { throw CapabilityUnavailable("down"); };
  const Scored down = summac_score("A.", "B.", failing);
  EXPECT_EQ(down.value, 0.0);
  EXPECT_EQ(down.flag, MetricFlag::kUnavailable);
}

// Frozen from tests/oracles/mock_consistency_oracle.py.
TEST(PaperConsistency, MatchesHandEvaluatedMockOracle) {
  const std::string reference =
      "Spin textures scatter conduction electrons in thin films. "
      "The scattering produces an anomalous Hall signal. "
      "We measure this signal across temperature.";
  const std::string generated =
      "Thin films host spin textures that scatter electrons. "
      "An anomalous Hall signal results from this scattering. "
      "The signal is measured at many temperatures.";
  JudgeClients clients = JudgeClients::mock();
  RewardEngine engine(clients);
  const PaperConsistencyScores pc = engine.paper_consistency(generated, reference);
  EXPECT_NEAR(pc.lexical.value, 0.16020720994064927, 1e-12);
  EXPECT_NEAR(pc.semantic.value, 0.01787538222691739, 1e-12);
  EXPECT_NEAR(pc.paper_coverage.value, 0.6, 1e-12);
  EXPECT_NEAR(pc.keyphrase_consistency.value, 0.55, 1e-12);
  EXPECT_NEAR(pc.entailment_consistency.value, 0.5535714285714285, 1e-12);
  EXPECT_NEAR(mock_embedding(reference).values[0], 0.16568122009333766, 1e-15);
}

TEST(PaperConsistency, IdentityAndDisjoint) {
  JudgeClients clients = JudgeClients::mock();
  RewardEngine engine(clients);
  const std::string text = "Layered magnets host skyrmions. Skyrmions move under small currents.";
  const auto same = engine.paper_consistency(text, text);
  EXPECT_DOUBLE_EQ(same.lexical.value, 1.0);
  EXPECT_DOUBLE_EQ(same.semantic.value, 1.0);
  EXPECT_EQ(same.paper_coverage.value, 1.0);
  EXPECT_EQ(same.keyphrase_consistency.value, 1.0);
  EXPECT_GE(same.entailment_consistency.value, 0.9);

  const auto apart = engine.paper_consistency("Alpha beta gamma delta.", "Omega sigma tau upsilon.");
  EXPECT_LT(apart.lexical.value, 1e-9);
  EXPECT_EQ(apart.paper_coverage.value, 0.0);
  EXPECT_EQ(apart.keyphrase_consistency.value, 0.0);
}

ReasoningGraph chain_graph(const std::vector<std::string>& sentences) {
  ReasoningGraph g;
  for (std::size_t i = 0; i < sentences.size(); ++i) g.nodes.push_back({"n" + std::to_string(i + 1), sentences[i]});
  for (std::size_t t = 3; t <= sentences.size(); t += 2) {
    g.edges.push_back({"n" + std::to_string(t - 2), "n" + std::to_string(t), EdgeKind::kDeductionRule});
    g.edges.push_back({"n" + std::to_string(t - 1), "n" + std::to_string(t), EdgeKind::kDeductionCase});
  }
  return g;
}

TEST(IdentityCeiling, GeneratedEqualsReferenceEqualsLinearization) {
  const ReasoningGraph g = chain_graph({"Ferromagnets show an extra Hall signal.",
                                        "The extra signal grows with magnetization.",
                                        "Magnetization drives the anomalous Hall effect."});
  ASSERT_TRUE(validate(g).valid());
  const std::string reference = linearize(g);
  PaperRecord paper;
  paper.id = "identity";
  paper.reference_introduction = reference;
  const Trajectory t = Trajectory::from_dot("identity", to_dot(g), reference);
  ASSERT_TRUE(t.validation.valid());

  JudgeClients clients = JudgeClients::mock();
  RewardEngine engine(clients);
  const EvaluationResult r = engine.evaluate(t, paper);
  EXPECT_EQ(r.metrics[Metric::kLexicalSimilarity], 1.0);
  for (Metric m : {Metric::kEntityCoverage, Metric::kGraphCoverage, Metric::kKeyphraseFaithfulness,
                   Metric::kPaperCoverage, Metric::kKeyphraseConsistency}) {
    EXPECT_EQ(r.metrics[m], 1.0) << to_string(m);
    EXPECT_EQ(r.metrics.flag(m), MetricFlag::kNone) << to_string(m);
  }
  EXPECT_GE(r.metrics[Metric::kEntailmentFaithfulness], 0.9);
  EXPECT_GE(r.metrics[Metric::kEntailmentConsistency], 0.9);
  EXPECT_NEAR(r.metrics[Metric::kSemanticSimilarity], 1.0, 1e-12);
  EXPECT_NEAR(r.metrics[Metric::kContextualRelevance], 1.0, 1e-12);
}

TEST(GraphValidity, EdgeAccuracyAndDegenerateCases) {
  JudgeClients clients = JudgeClients::mock();
  RewardEngine engine(clients);
  ReasoningGraph g{{{"a", "alpha beta gamma delta echo"}, {"b", "zulu"}, {"c", "alpha yankee xray whiskey victor"}},
                   {{"a", "c", EdgeKind::kDeductionRule}, {"b", "c", EdgeKind::kDeductionCase}}};
  const auto scores = engine.graph_validity(g, validate(g), "Alpha beta matters.");
  EXPECT_DOUBLE_EQ(scores.rea.value, 0.5);

  const auto empty = engine.graph_validity(ReasoningGraph{}, ValidationReport{}, "Alpha beta matters.");
  EXPECT_EQ(empty.rea.value, 0.0);
  EXPECT_EQ(empty.rea.flag, MetricFlag::kDegenerate);
  EXPECT_EQ(empty.entity_coverage.value, 0.0);

  ReasoningGraph dangling = g;
  dangling.edges.push_back({"ghost", "c", EdgeKind::kInductionCase});
  EXPECT_NEAR(engine.graph_validity(dangling, validate(dangling), "x").rea.value, 1.0 / 3.0, 1e-12);
}

TEST(ReferenceAlignment, RecallAndUsage) {
  JudgeClients clients = JudgeClients::mock();
  RewardEngine engine(clients);
  const std::vector<ReferenceEntry> refs{{1, "One."}, {2, "Two."}};
  const auto none = engine.reference_alignment("No markers.", "Cites [1].", refs);
  EXPECT_EQ(none.recall.value, 0.0);
  EXPECT_EQ(none.usage_correctness.value, 0.0);
  EXPECT_EQ(none.usage_correctness.flag, MetricFlag::kDegenerate);

  const auto out_of_range = engine.reference_alignment("Bad [7]. Also bad [9].", "Cites [1].", refs);
  EXPECT_EQ(out_of_range.usage_correctness.value, 0.0);
  EXPECT_EQ(out_of_range.usage_correctness.flag, MetricFlag::kNone);

  const auto no_ref_citations = engine.reference_alignment("Good [1].", "Cites nothing.", refs);
  EXPECT_EQ(no_ref_citations.recall.value, 1.0);
  EXPECT_EQ(no_ref_citations.recall.flag, MetricFlag::kDegenerate);
}

TEST(Evaluate, FillsAllMetricsDeterministically) {
  PaperRecord paper;
  paper.id = "p";
  paper.reference_introduction = "Hall effects reveal band topology [1]. Circuits emulate lattices [2].";
  paper.references = {{1, "Hall."}, {2, "Circuits."}};
  const Trajectory t = Trajectory::from_dot(
      "p",
      "digraph { a [label=\"Hall effects reveal topology.\"]; b [label=\"Circuits emulate lattices.\"];"
      " c [label=\"Circuits reveal topology.\"]; a -> c [label=\"abduction-phenomenon\"];"
      " b -> c [label=\"abduction-knowledge\"]; }",
      "Circuits emulate lattices [2]. Hall effects reveal topology [1].");
  JudgeClients clients = JudgeClients::mock();
  RewardEngine engine(clients);
  const EvaluationResult a = engine.evaluate(t, paper);
  const EvaluationResult b = engine.evaluate(t, paper);
  EXPECT_EQ(a.metrics.values, b.metrics.values);
  for (double v : a.metrics.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(a.metrics[Metric::kReferenceRecall], 1.0);
  EXPECT_GE(a.reward.total_reward, 0.0);
  EXPECT_LE(a.reward.total_reward, 5.0);
}

TEST(Trajectory, UnparseableGraphKeepsOnlyParseDiagnostics) {
  const Trajectory t = Trajectory::from_dot("p", "graph { a -- b }", "Intro.");
  EXPECT_EQ(t.validation.codes(), std::vector<DiagnosticCode>{DiagnosticCode::kParse});
  EXPECT_TRUE(t.graph.nodes.empty());
}

}  // namespace
}  // namespace lector
