#include "lector/reasoning_graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "json.hpp"

namespace lector {

namespace {

constexpr std::array<std::string_view, 6> kEdgeKindNames = {
    "deduction-rule",       "deduction-case",      "induction-common",
    "induction-case",       "abduction-phenomenon", "abduction-knowledge",
};

constexpr std::array<std::string_view, kDiagnosticCodeCount> kCodeNames = {
    "E_PARSE",     "E_DUP_NODE",     "E_DANGLING_EDGE", "E_SELF_LOOP", "E_BAD_EDGE_KIND",
    "E_CYCLE",     "E_MULTI_ROOT",   "E_NO_ROOT",       "E_BAD_PAIR",  "E_BAD_INDEGREE",
    "E_MAX_NODES", "E_DISCONNECTED", "E_EMPTY_TRANSCRIPTION",
};

std::size_t index_of(EdgeKind kind) { return static_cast<std::size_t>(kind); }

}  // namespace

std::string_view to_string(EdgeKind kind) { return kEdgeKindNames[index_of(kind)]; }

std::string_view to_string(Paradigm paradigm) {
  switch (paradigm) {
    case Paradigm::kDeduction:
      return "deduction";
    case Paradigm::kInduction:
      return "induction";
    case Paradigm::kAbduction:
      return "abduction";
  }
  return "unknown";
}

std::optional<EdgeKind> parse_edge_kind(std::string_view text) {
  for (std::size_t i = 0; i < kEdgeKindNames.size(); ++i) {
    if (kEdgeKindNames[i] == text) return static_cast<EdgeKind>(i);
  }
  return std::nullopt;
}

Paradigm paradigm_of(EdgeKind kind) { return static_cast<Paradigm>(index_of(kind) / 2); }

EdgeKind partner_of(EdgeKind kind) { return static_cast<EdgeKind>(index_of(kind) ^ 1U); }

bool forms_pair(EdgeKind a, EdgeKind b) { return a != b && partner_of(a) == b; }

std::string_view role_description(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kDeductionRule:
      return "a general principle, law, or established rule";
    case EdgeKind::kDeductionCase:
      return "a specific instance or case that falls under the general rule";
    case EdgeKind::kInductionCommon:
      return "a general pattern or commonality abstracted across multiple observations";
    case EdgeKind::kInductionCase:
      return "an individual observation or piece of evidence supporting the pattern";
    case EdgeKind::kAbductionPhenomenon:
      return "an observation or phenomenon that requires an explanation";
    case EdgeKind::kAbductionKnowledge:
      return "background knowledge that offers the best explanation for the phenomenon";
  }
  return "";
}

const GraphNode* ReasoningGraph::find_node(std::string_view id) const {
  auto it = std::find_if(nodes.begin(), nodes.end(), [&](const GraphNode& n) { return n.id == id; });
  return it == nodes.end() ? nullptr : &*it;
}

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

std::string_view to_string(DiagnosticCode code) { return kCodeNames[static_cast<std::size_t>(code)]; }

std::optional<DiagnosticCode> parse_diagnostic_code(std::string_view text) {
  for (std::size_t i = 0; i < kCodeNames.size(); ++i) {
    if (kCodeNames[i] == text) return static_cast<DiagnosticCode>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Severity severity) {
  return severity == Severity::kError ? "error" : "warning";
}

bool ValidationReport::valid() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

bool ValidationReport::has(DiagnosticCode code) const {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [code](const Diagnostic& d) { return d.code == code; });
}

std::vector<DiagnosticCode> ValidationReport::codes() const {
  std::vector<DiagnosticCode> out;
  out.reserve(diagnostics.size());
  for (const auto& d : diagnostics) out.push_back(d.code);
  return out;
}

std::string ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["valid"] = valid();
  j["diagnostics"] = nlohmann::ordered_json::array();
  for (const auto& d : diagnostics) {
    j["diagnostics"].push_back({{"code", to_string(d.code)},
                                {"severity", to_string(d.severity)},
                                {"message", d.message},
                                {"location", d.location}});
  }
  return j.dump(2) + "\n";
}

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
  auto key = [](const Diagnostic& d) { return std::tie(d.code, d.location, d.message, d.severity); };
  std::sort(diagnostics.begin(), diagnostics.end(),
            [&](const Diagnostic& a, const Diagnostic& b) { return key(a) < key(b); });
  diagnostics.erase(std::unique(diagnostics.begin(), diagnostics.end()), diagnostics.end());
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string to_dot(const ReasoningGraph& graph) {
  std::vector<const GraphEdge*> edges;
  edges.reserve(graph.edges.size());
  for (const auto& e : graph.edges) edges.push_back(&e);
  std::sort(edges.begin(), edges.end(), [](const GraphEdge* a, const GraphEdge* b) {
    return std::tie(a->src, a->dst, a->kind) < std::tie(b->src, b->dst, b->kind);
  });

  std::string out = "digraph G {\n";
  for (const auto& n : graph.nodes) {
    out += "  " + quote(n.id) + " [label=" + quote(n.transcription) + "];\n";
  }
  for (const GraphEdge* e : edges) {
    out += "  " + quote(e->src) + " -> " + quote(e->dst) + " [label=" + quote(to_string(e->kind)) + "];\n";
  }
  out += "}\n";
  return out;
}

bool DotParseResult::syntax_ok() const {
  return std::none_of(diagnostics.begin(), diagnostics.end(),
                      [](const Diagnostic& d) { return d.code == DiagnosticCode::kParse; });
}

ValidationReport check_dot(std::string_view text) {
  DotParseResult parsed = parse_dot(text);
  const bool syntax_ok = parsed.syntax_ok();
  ValidationReport report{std::move(parsed.diagnostics)};
  if (syntax_ok) {
    auto structural = validate(parsed.graph).diagnostics;
    report.diagnostics.insert(report.diagnostics.end(), structural.begin(), structural.end());
  }
  sort_diagnostics(report.diagnostics);
  return report;
}

// ---------------------------------------------------------------------------
// Ordering
// ---------------------------------------------------------------------------

std::vector<std::string> topological_order(const ReasoningGraph& graph) {
  std::map<std::string, std::size_t, std::less<>> indegree;
  for (const auto& n : graph.nodes) indegree.emplace(n.id, 0);
  std::map<std::string, std::vector<std::string>, std::less<>> successors;
  for (const auto& e : graph.edges) {
    if (!indegree.contains(e.src) || !indegree.contains(e.dst)) continue;
    successors[e.src].push_back(e.dst);
    ++indegree[e.dst];
  }

  std::priority_queue<std::string, std::vector<std::string>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push(id);
  }

  std::vector<std::string> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    std::string id = ready.top();
    ready.pop();
    if (auto it = successors.find(id); it != successors.end()) {
      for (const auto& next : it->second) {
        if (--indegree[next] == 0) ready.push(next);
      }
    }
    order.push_back(std::move(id));
  }
  if (order.size() != indegree.size()) {
    throw GraphCycleError("E_CYCLE: graph contains a directed cycle");
  }
  return order;
}

std::string linearize(const ReasoningGraph& graph) {
  std::string out;
  bool first = true;
  for (const auto& id : topological_order(graph)) {
    if (!first) out.push_back('\n');
    first = false;
    out += graph.find_node(id)->transcription;
  }
  return out;
}

std::string root_of(const ReasoningGraph& graph) {
  if (!validate(graph).valid()) throw ContractViolation("root_of requires a valid reasoning graph");
  std::set<std::string_view> has_out;
  for (const auto& e : graph.edges) has_out.insert(e.src);
  for (const auto& n : graph.nodes) {
    if (!has_out.contains(n.id)) return n.id;
  }
  throw ContractViolation("valid graph without a sink");
}

std::vector<ReasoningStep> reasoning_steps(const ReasoningGraph& graph) {
  if (!validate(graph).valid()) throw ContractViolation("reasoning_steps requires a valid reasoning graph");
  std::map<std::string_view, std::vector<const GraphEdge*>> incoming;
  for (const auto& e : graph.edges) incoming[e.dst].push_back(&e);

  std::vector<ReasoningStep> steps;
  for (const auto& id : topological_order(graph)) {
    auto it = incoming.find(id);
    if (it == incoming.end()) continue;
    auto pair = it->second;
    std::sort(pair.begin(), pair.end(),
              [](const GraphEdge* a, const GraphEdge* b) { return a->kind < b->kind; });
    steps.push_back({{pair[0]->src, pair[1]->src}, id, paradigm_of(pair[0]->kind)});
  }
  return steps;
}

}  // namespace lector
