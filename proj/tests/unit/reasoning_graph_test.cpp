#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lector/corpus.hpp"
#include "lector/errors.hpp"
#include "lector/reasoning_graph.hpp"
#include "test_support.hpp"

namespace lector {
namespace {

using testing::fixture_dir;

std::vector<std::string> expected_codes(const std::string& text) {
  const std::string marker = "// expect:";
  EXPECT_EQ(text.rfind(marker, 0), 0u) << "fixture lacks an expect line";
  std::istringstream line(text.substr(marker.size(), text.find('\n') - marker.size()));
  std::vector<std::string> codes;
  for (std::string code; line >> code;) {
    if (code != "none") codes.push_back(code);
  }
  std::sort(codes.begin(), codes.end());
  return codes;
}

std::vector<std::string> code_names(const ValidationReport& report) {
  std::vector<std::string> out;
  for (auto c : report.codes()) out.emplace_back(to_string(c));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::filesystem::path> graph_fixtures() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(fixture_dir() / "graphs")) {
    if (e.path().extension() == ".dot") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

ReasoningGraph minimal_graph() {
  return {{{"a", "Metals conduct."}, {"b", "Copper is a metal."}, {"c", "Copper conducts."}},
          {{"a", "c", EdgeKind::kDeductionRule}, {"b", "c", EdgeKind::kDeductionCase}}};
}

TEST(GraphFixtures, SuiteMatchesExpectedDiagnostics) {
  const auto files = graph_fixtures();
  ASSERT_GE(files.size(), 25u);
  std::set<std::string> covered;
  for (const auto& path : files) {
    const std::string text = read_file(path);
    const ValidationReport report = check_dot(text);
    EXPECT_EQ(code_names(report), expected_codes(text)) << path.filename();
    for (auto c : report.codes()) covered.insert(std::string(to_string(c)));
  }
  EXPECT_EQ(covered.size(), kDiagnosticCodeCount);
}

TEST(GraphFixtures, ValidGraphsRoundTripThroughCanonicalDot) {
  for (const auto& path : graph_fixtures()) {
    const std::string text = read_file(path);
    if (!expected_codes(text).empty()) continue;
    const DotParseResult first = parse_dot(text);
    ASSERT_TRUE(first.ok()) << path.filename();
    const std::string canonical = to_dot(first.graph);
    const DotParseResult second = parse_dot(canonical);
    ASSERT_TRUE(second.ok()) << canonical;
    EXPECT_EQ(to_dot(second.graph), canonical) << path.filename();
    EXPECT_EQ(second.graph.nodes, first.graph.nodes);
    EXPECT_TRUE(validate(second.graph).valid());
  }
}

TEST(EdgeKinds, PairsAndNames) {
  for (EdgeKind k : kAllEdgeKinds) {
    EXPECT_EQ(parse_edge_kind(to_string(k)), k);
    EXPECT_EQ(paradigm_of(partner_of(k)), paradigm_of(k));
    EXPECT_NE(partner_of(k), k);
    EXPECT_EQ(partner_of(partner_of(k)), k);
    EXPECT_TRUE(forms_pair(k, partner_of(k)));
    EXPECT_TRUE(forms_pair(partner_of(k), k));
    EXPECT_FALSE(forms_pair(k, k));
    EXPECT_FALSE(role_description(k).empty());
  }
  EXPECT_FALSE(forms_pair(EdgeKind::kDeductionRule, EdgeKind::kInductionCase));
  EXPECT_FALSE(parse_edge_kind("Deduction-Rule"));
  EXPECT_FALSE(parse_edge_kind("deduction"));
  EXPECT_EQ(to_string(Paradigm::kAbduction), "abduction");
}

TEST(DiagnosticCodes, NamesRoundTripInSortOrder) {
  for (std::size_t i = 0; i < kDiagnosticCodeCount; ++i) {
    auto code = static_cast<DiagnosticCode>(i);
    EXPECT_EQ(parse_diagnostic_code(to_string(code)), code);
  }
  EXPECT_EQ(to_string(DiagnosticCode::kParse), "E_PARSE");
  EXPECT_EQ(to_string(DiagnosticCode::kEmptyTranscription), "E_EMPTY_TRANSCRIPTION");
  EXPECT_FALSE(parse_diagnostic_code("E_NOPE"));
}

TEST(DotParser, ReadsLabelsEscapesAndAttributes) {
  const auto r = parse_dot(R"(digraph {
    "x y" [label="say \"hi\"\nthere", shape=box];
    z [label=plain_id];
    w;
    "x y" -> z [type="deduction-rule"];
  })");
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r.graph.nodes.size(), 3u);
  EXPECT_EQ(r.graph.nodes[0].id, "x y");
  EXPECT_EQ(r.graph.nodes[0].transcription, "say \"hi\" there");
  EXPECT_EQ(r.graph.nodes[1].transcription, "plain_id");
  EXPECT_EQ(r.graph.nodes[2].transcription, "w");
  ASSERT_EQ(r.graph.edges.size(), 1u);
  EXPECT_EQ(r.graph.edges[0], (GraphEdge{"x y", "z", EdgeKind::kDeductionRule}));
}

TEST(DotParser, LabelTakesPrecedenceOverType) {
  const auto r = parse_dot(R"(digraph { a; b; a -> b [type="deduction-case", label="induction-case"]; })");
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r.graph.edges.at(0).kind, EdgeKind::kInductionCase);
}

TEST(DotParser, ReportsParseLocation) {
  const auto r = parse_dot("digraph {\n  a [label=\"x\"\n");
  ASSERT_FALSE(r.syntax_ok());
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].code, DiagnosticCode::kParse);
  EXPECT_EQ(r.diagnostics[0].location.rfind("line ", 0), 0u);
}

TEST(DotParser, StripsFencesAndProse) {
  const std::string inner = "digraph G { a -> b [label=\"deduction-rule\"]; }";
  EXPECT_EQ(strip_dot_wrapper("Here it is:\n```dot\n" + inner + "\n```\nDone."), inner);
  EXPECT_EQ(strip_dot_wrapper("```\n" + inner + "\n```"), inner);
  EXPECT_EQ(strip_dot_wrapper("prefix " + inner + " suffix"), inner);
  EXPECT_EQ(strip_dot_wrapper("no graph here"), "no graph here");
}

TEST(DotParser, RandomInputNeverThrows) {
  std::mt19937_64 rng(7);
  const std::string alphabet = "digraph{}[]=;,->\"\\ abc\n#/*";
  for (int i = 0; i < 2000; ++i) {
    std::string text;
    const std::size_t len = rng() % 60;
    for (std::size_t j = 0; j < len; ++j) text.push_back(alphabet[rng() % alphabet.size()]);
    EXPECT_NO_THROW({
      auto report = check_dot(text);
      (void)report;
    }) << text;
  }
}

TEST(Validator, MinimalGraphIsValid) {
  const ReasoningGraph g = minimal_graph();
  EXPECT_TRUE(validate(g).valid());
  EXPECT_EQ(root_of(g), "c");
}

TEST(Validator, DeterministicAndSorted) {
  ReasoningGraph g = minimal_graph();
  g.nodes.push_back({"z", ""});
  g.edges.push_back({"c", "c", EdgeKind::kDeductionRule});
  const auto a = validate(g);
  const auto b = validate(g);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.diagnostics.begin(), a.diagnostics.end(),
                             [](const Diagnostic& x, const Diagnostic& y) { return x.code < y.code; }));
}

TEST(Validator, FiftyNodesAllowedFiftyOneRejected) {
  auto chain = [](int n) {
    ReasoningGraph g;
    for (int i = 1; i <= n; ++i) g.nodes.push_back({"n" + std::to_string(i), "step " + std::to_string(i)});
    for (int t = 3; t <= n; t += 2) {
      g.edges.push_back({"n" + std::to_string(t - 2), "n" + std::to_string(t), EdgeKind::kInductionCommon});
      g.edges.push_back({"n" + std::to_string(t - 1), "n" + std::to_string(t), EdgeKind::kInductionCase});
    }
    return g;
  };
  ReasoningGraph fifty = chain(49);
  fifty.nodes.push_back({"extra", "an unconnected remark"});
  EXPECT_FALSE(validate(fifty).has(DiagnosticCode::kMaxNodes));
  EXPECT_TRUE(validate(chain(51)).has(DiagnosticCode::kMaxNodes));
  EXPECT_TRUE(validate(chain(49)).valid());
}

TEST(Ordering, TopologicalOrderBreaksTiesById) {
  ReasoningGraph g{{{"m", "M."}, {"b", "B."}, {"c", "C."}, {"a", "A."}, {"r", "R."}},
                   {{"m", "c", EdgeKind::kDeductionRule},
                    {"b", "c", EdgeKind::kDeductionCase},
                    {"c", "r", EdgeKind::kAbductionPhenomenon},
                    {"a", "r", EdgeKind::kAbductionKnowledge}}};
  ASSERT_TRUE(validate(g).valid());
  EXPECT_EQ(topological_order(g), (std::vector<std::string>{"a", "b", "m", "c", "r"}));
  EXPECT_EQ(linearize(g), "A.\nB.\nM.\nC.\nR.");
  const auto steps = reasoning_steps(g);
  ASSERT_EQ(steps.size(), 2u);
  EXPECT_EQ(steps[0], (ReasoningStep{{"m", "b"}, "c", Paradigm::kDeduction}));
  EXPECT_EQ(steps[1], (ReasoningStep{{"c", "a"}, "r", Paradigm::kAbduction}));
}

TEST(Ordering, CycleAndInvalidPreconditions) {
  const auto cyclic = parse_dot(read_file(fixture_dir() / "graphs" / "cycle.dot"));
  ASSERT_TRUE(cyclic.ok());
  EXPECT_THROW(topological_order(cyclic.graph), GraphCycleError);
  EXPECT_THROW(linearize(cyclic.graph), GraphCycleError);
  EXPECT_THROW(root_of(cyclic.graph), ContractViolation);
  EXPECT_THROW(reasoning_steps(cyclic.graph), ContractViolation);
}

TEST(Serialization, CanonicalDotSortsEdgesAndEscapes) {
  ReasoningGraph g{{{"b", "say \"x\""}, {"a", "line\nbreak"}, {"c", "C"}},
                   {{"b", "c", EdgeKind::kDeductionCase}, {"a", "c", EdgeKind::kDeductionRule}}};
  const std::string dot = to_dot(g);
  EXPECT_LT(dot.find("\"a\" -> \"c\""), dot.find("\"b\" -> \"c\""));
  const auto back = parse_dot(dot);
  ASSERT_TRUE(back.ok());
  EXPECT_EQ(back.graph.nodes, g.nodes);
}

TEST(Reports, JsonCarriesCodesInOrder) {
  const auto report = check_dot(read_file(fixture_dir() / "graphs" / "multiple_errors.dot"));
  const std::string json = report.to_json();
  EXPECT_LT(json.find("E_SELF_LOOP"), json.find("E_BAD_PAIR"));
  EXPECT_LT(json.find("E_BAD_PAIR"), json.find("E_DISCONNECTED"));
  EXPECT_NE(json.find("\"valid\": false"), std::string::npos);
}

}  // namespace
}  // namespace lector
