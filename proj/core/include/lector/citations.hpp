#pragma once

#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lector {

struct ReferenceEntry {
  int index = 0;
  std::string text;

  friend bool operator==(const ReferenceEntry&, const ReferenceEntry&) = default;
};

/// One `[..]` marker, or a dash-joined run of markers such as `[1]--[8]`.
struct CitationOccurrence {
  std::set<int> indices;
  std::size_t begin = 0;  // byte span in the source, [begin, end)
  std::size_t end = 0;
  std::string sentence;
};

/// Markers follow `[item (, item)*]` with `item = n | n-m`; ranges accept
/// '-', '--', en dash and em dash. Bracket contents that do not match (e.g.
/// `[Fig. 2]`) are skipped. Results are ordered by span.
std::vector<CitationOccurrence> parse_citations(std::string_view text);

std::set<int> cited_set(std::string_view text);

struct CitationDiagnostic {
  int index = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string message;
};

/// One diagnostic per cited index missing from `references`.
std::vector<CitationDiagnostic> validate_indices(std::span<const CitationOccurrence> occurrences,
                                                 std::span<const ReferenceEntry> references);

/// |cited(generated) ∩ cited(reference)| / |cited(reference)|; 1 when the
/// reference introduction cites nothing.
double reference_recall(std::string_view generated, std::string_view reference_intro);

/// "index. text" lines in ascending index order.
std::string render_reference_list(std::span<const ReferenceEntry> references);

}  // namespace lector
