#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lector/errors.hpp"

namespace lector {

// ---------------------------------------------------------------------------
// Edge kinds
// ---------------------------------------------------------------------------

/// The six premise roles. Enumerators are ordered so that each paradigm's
/// two roles are adjacent, "general" role first.
enum class EdgeKind {
  kDeductionRule,
  kDeductionCase,
  kInductionCommon,
  kInductionCase,
  kAbductionPhenomenon,
  kAbductionKnowledge,
};

enum class Paradigm { kDeduction, kInduction, kAbduction };

inline constexpr std::array<EdgeKind, 6> kAllEdgeKinds = {
    EdgeKind::kDeductionRule,       EdgeKind::kDeductionCase,
    EdgeKind::kInductionCommon,     EdgeKind::kInductionCase,
    EdgeKind::kAbductionPhenomenon, EdgeKind::kAbductionKnowledge,
};

std::string_view to_string(EdgeKind kind);
std::string_view to_string(Paradigm paradigm);

/// Exact, case-sensitive match against the six kind names.
std::optional<EdgeKind> parse_edge_kind(std::string_view text);

Paradigm paradigm_of(EdgeKind kind);

/// The other member of `kind`'s paradigm pair.
EdgeKind partner_of(EdgeKind kind);

/// True when {a, b} is exactly one paradigm pair.
bool forms_pair(EdgeKind a, EdgeKind b);

/// Short description of the premise role, used in verifier prompts.
std::string_view role_description(EdgeKind kind);

// ---------------------------------------------------------------------------
// Graph
// ---------------------------------------------------------------------------

struct GraphNode {
  std::string id;
  std::string transcription;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::string src;  // premise
  std::string dst;  // conclusion
  EdgeKind kind = EdgeKind::kDeductionRule;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

/// Plain data; structural rules are checked by `validate`, not enforced here.
struct ReasoningGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  const GraphNode* find_node(std::string_view id) const;

  friend bool operator==(const ReasoningGraph&, const ReasoningGraph&) = default;
};

inline constexpr std::size_t kMaxGraphNodes = 50;

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

/// Declaration order is the report sort order.
enum class DiagnosticCode {
  kParse,
  kDupNode,
  kDanglingEdge,
  kSelfLoop,
  kBadEdgeKind,
  kCycle,
  kMultiRoot,
  kNoRoot,
  kBadPair,
  kBadIndegree,
  kMaxNodes,
  kDisconnected,
  kEmptyTranscription,
};

inline constexpr std::size_t kDiagnosticCodeCount = 13;

enum class Severity { kError, kWarning };

/// "E_PARSE", "E_DUP_NODE", ...
std::string_view to_string(DiagnosticCode code);
std::optional<DiagnosticCode> parse_diagnostic_code(std::string_view text);
std::string_view to_string(Severity severity);

struct Diagnostic {
  DiagnosticCode code = DiagnosticCode::kParse;
  Severity severity = Severity::kError;
  std::string message;
  std::string location;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct ValidationReport {
  std::vector<Diagnostic> diagnostics;

  bool valid() const;
  bool has(DiagnosticCode code) const;
  /// Codes in report order, one entry per diagnostic.
  std::vector<DiagnosticCode> codes() const;
  std::string to_json() const;

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Sorts by (code, location, message) and drops exact duplicates.
void sort_diagnostics(std::vector<Diagnostic>& diagnostics);

// ---------------------------------------------------------------------------
// DOT parsing and serialization
// ---------------------------------------------------------------------------

struct DotParseResult {
  ReasoningGraph graph;
  /// Parse-level problems: E_PARSE, E_BAD_EDGE_KIND, E_DUP_NODE.
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return diagnostics.empty(); }
  /// False only for E_PARSE; the graph is usable otherwise.
  bool syntax_ok() const;
};

/// Removes Markdown code fences and any prose around the first
/// `[strict] (di)graph [name] { ... }` block. Returns the input unchanged when
/// no graph header is found.
std::string strip_dot_wrapper(std::string_view text);

/// Parses the DOT subset emitted by the extraction stage. `graph` is only
/// meaningful when `ok()`.
DotParseResult parse_dot(std::string_view text);

/// Canonical DOT: nodes in stored order, edges sorted by (src, dst, kind).
std::string to_dot(const ReasoningGraph& graph);

/// Parser diagnostics plus, unless there was a syntax error, the structural
/// ones.
ValidationReport check_dot(std::string_view text);

// ---------------------------------------------------------------------------
// Structural operations
// ---------------------------------------------------------------------------

/// Lists every violated structural rule; pure and deterministic.
ValidationReport validate(const ReasoningGraph& graph);

/// The unique sink. Throws ContractViolation unless `validate(graph).valid()`.
std::string root_of(const ReasoningGraph& graph);

/// Carries E_CYCLE; thrown by the ordering operations on cyclic graphs.
class GraphCycleError : public Error {
 public:
  using Error::Error;
};

/// Node ids in topological order, ties broken by lexicographic id. Edges whose
/// endpoints are missing are ignored. Throws GraphCycleError on cycles.
std::vector<std::string> topological_order(const ReasoningGraph& graph);

/// One transcription per line in `topological_order`.
std::string linearize(const ReasoningGraph& graph);

struct ReasoningStep {
  /// Ordered by role: rule/common/phenomenon first.
  std::pair<std::string, std::string> premise_ids;
  std::string conclusion_id;
  Paradigm paradigm = Paradigm::kDeduction;

  friend bool operator==(const ReasoningStep&, const ReasoningStep&) = default;
};

/// One step per node with incoming edges, topologically ordered.
/// Throws ContractViolation unless `validate(graph).valid()`.
std::vector<ReasoningStep> reasoning_steps(const ReasoningGraph& graph);

}  // namespace lector
