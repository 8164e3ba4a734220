#include <array>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "lector/digest.hpp"
#include "lector/judge_clients.hpp"
#include "lector/pipeline.hpp"

namespace lector {

Embedding mock_embedding(std::string_view text, std::size_t dimension) {
  const Sha256 digest = sha256(text);
  std::uint64_t seed = 0;
  for (std::size_t i = 0; i < 8; ++i) seed = (seed << 8) | digest[i];
  std::mt19937_64 rng(seed);

  Embedding e;
  e.values.resize(dimension);
  double norm = 0;
  for (double& v : e.values) {
    v = static_cast<double>(rng() >> 11) * 0x1.0p-53 * 2.0 - 1.0;
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm > 0) {
    for (double& v : e.values) v /= norm;
  }
  return e;
}

NliProbs mock_nli(std::string_view premise, std::string_view hypothesis) {
  const double r = overlap_ratio(premise, hypothesis);
  return {r, 0.75 * (1.0 - r), 0.25 * (1.0 - r)};
}

int mock_likert(std::string_view rendered_prompt) { return 1 + sha256(rendered_prompt)[0] % 5; }

bool mock_binary(std::string_view rendered_prompt) { return sha256(rendered_prompt)[0] % 2 == 0; }

bool mock_edge(std::string_view premise, std::string_view conclusion) {
  return overlap_ratio(premise, conclusion) >= 0.2;
}

Embedding MockEmbeddingService::embed(std::string_view text) { return mock_embedding(text, dimension_); }

NliProbs MockNliService::nli(std::string_view premise, std::string_view hypothesis) {
  return mock_nli(premise, hypothesis);
}

// ---------------------------------------------------------------------------
// Mock generator
// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view kContentMarker = "PAPER CONTENT:";
constexpr std::string_view kGraphMarker = "GRAPHVIZ DOT:";
constexpr std::string_view kReferencesMarker = "REFERENCES:";
constexpr std::size_t kMaxMockNodes = 7;

std::string squash_spaces(std::string_view s) {
  std::string out;
  bool space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

std::string mock_graph(std::string_view content) {
  std::vector<std::string> sentences;
  for (const auto& s : split_sentences(content)) sentences.push_back(squash_spaces(s));
  while (sentences.size() < 3) sentences.push_back("The preceding statement is taken as given.");
  std::size_t n = std::min(sentences.size(), kMaxMockNodes);
  if (n % 2 == 0) --n;

  static constexpr std::array<std::pair<EdgeKind, EdgeKind>, 3> kSteps = {{
      {EdgeKind::kDeductionRule, EdgeKind::kDeductionCase},
      {EdgeKind::kInductionCommon, EdgeKind::kInductionCase},
      {EdgeKind::kAbductionKnowledge, EdgeKind::kAbductionPhenomenon},
  }};

  // n1 + n2 -> n3, n3 + n4 -> n5, ...
  ReasoningGraph g;
  for (std::size_t i = 0; i < n; ++i) g.nodes.push_back({"n" + std::to_string(i + 1), sentences[i]});
  for (std::size_t target = 2, step = 0; target < n; target += 2, ++step) {
    const auto& [first, second] = kSteps[step % kSteps.size()];
    g.edges.push_back({g.nodes[target - 2].id, g.nodes[target].id, first});
    g.edges.push_back({g.nodes[target - 1].id, g.nodes[target].id, second});
  }
  return "Here is the reasoning graph.\n\n```dot\n" + to_dot(g) + "```\n";
}

std::vector<int> listed_indices(std::string_view references) {
  std::vector<int> out;
  std::istringstream in{std::string(references)};
  std::string line;
  while (std::getline(in, line)) {
    std::size_t i = 0;
    while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
    if (i > 0 && i < 10 && i < line.size() && line[i] == '.') out.push_back(std::stoi(line.substr(0, i)));
  }
  return out;
}

std::string mock_introduction(std::string_view graph_dot, std::string_view references) {
  DotParseResult parsed = parse_dot(graph_dot);
  std::vector<std::string> lines;
  if (parsed.ok()) {
    try {
      for (const auto& id : topological_order(parsed.graph)) lines.push_back(parsed.graph.find_node(id)->transcription);
    } catch (const GraphCycleError&) {
      for (const auto& node : parsed.graph.nodes) lines.push_back(node.transcription);
    }
  }
  if (lines.empty()) lines.push_back("This work studies the problem described in the provided material.");

  const std::vector<int> indices = listed_indices(references);
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string sentence = squash_spaces(lines[i]);
    while (!sentence.empty() && (sentence.back() == '.' || sentence.back() == ' ')) sentence.pop_back();
    if (i < indices.size() && i < 3) sentence += " [" + std::to_string(indices[i]) + "]";
    if (!out.empty()) out.push_back(' ');
    out += sentence + ".";
  }
  return out + "\n";
}

}  // namespace

std::string MockGenerationService::complete(std::string_view prompt) {
  if (auto at = prompt.rfind(kGraphMarker); at != std::string_view::npos) {
    std::string_view rest = prompt.substr(at + kGraphMarker.size());
    auto refs = rest.rfind(kReferencesMarker);
    std::string_view dot = refs == std::string_view::npos ? rest : rest.substr(0, refs);
    std::string_view list = refs == std::string_view::npos ? std::string_view{} : rest.substr(refs + kReferencesMarker.size());
    return mock_introduction(dot, list);
  }
  if (auto at = prompt.rfind(kContentMarker); at != std::string_view::npos) {
    return mock_graph(prompt.substr(at + kContentMarker.size()));
  }
  throw CapabilityUnavailable("mock generator does not recognise the prompt");
}

}  // namespace lector
