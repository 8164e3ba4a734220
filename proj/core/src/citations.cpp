#include "lector/citations.hpp"

#include <algorithm>
#include <map>
#include <optional>

#include "lector/text_metrics.hpp"

namespace lector {

namespace {

constexpr int kMaxRangeSpan = 1000;
constexpr std::size_t kMaxDigits = 9;

struct Cursor {
  std::string_view s;
  std::size_t pos = 0;

  bool done() const { return pos >= s.size(); }
  void skip_spaces() {
    while (!done() && (s[pos] == ' ' || s[pos] == '\t')) ++pos;
  }
  std::optional<int> integer() {
    std::size_t start = pos;
    while (!done() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    std::size_t len = pos - start;
    if (len == 0 || len > kMaxDigits) return std::nullopt;
    int value = std::stoi(std::string(s.substr(start, len)));
    if (value <= 0) return std::nullopt;
    return value;
  }
  bool dash() {
    static constexpr std::string_view kDashes[] = {"\xE2\x80\x94", "\xE2\x80\x93", "--", "-"};
    for (auto d : kDashes) {
      if (s.substr(pos, d.size()) == d) {
        pos += d.size();
        return true;
      }
    }
    return false;
  }
};

bool add_range(std::set<int>& out, int lo, int hi) {
  if (hi < lo || hi - lo > kMaxRangeSpan) return false;
  for (int i = lo; i <= hi; ++i) out.insert(i);
  return true;
}

struct Group {
  std::set<int> indices;
  int first = 0;
  int last = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Parses the inside of one bracket pair.
std::optional<Group> parse_list(std::string_view body) {
  Cursor c{body};
  Group g;
  bool first_item = true;
  while (true) {
    c.skip_spaces();
    auto lo = c.integer();
    if (!lo) return std::nullopt;
    int hi = *lo;
    std::size_t mark = c.pos;
    c.skip_spaces();
    if (c.dash()) {
      c.skip_spaces();
      auto end = c.integer();
      if (!end) return std::nullopt;
      hi = *end;
    } else {
      c.pos = mark;
    }
    if (!add_range(g.indices, *lo, hi)) return std::nullopt;
    if (first_item) g.first = *lo;
    first_item = false;
    g.last = hi;
    c.skip_spaces();
    if (c.done()) return g;
    if (body[c.pos] != ',') return std::nullopt;
    ++c.pos;
  }
}

/// True when `between` is a lone dash with optional surrounding spaces.
bool is_joiner(std::string_view between) {
  Cursor c{between};
  c.skip_spaces();
  if (!c.dash()) return false;
  c.skip_spaces();
  return c.done();
}

}  // namespace

std::vector<CitationOccurrence> parse_citations(std::string_view text) {
  std::vector<Group> groups;
  std::size_t pos = 0;
  while ((pos = text.find('[', pos)) != std::string_view::npos) {
    std::size_t close = text.find_first_of("[]", pos + 1);
    if (close == std::string_view::npos) break;
    if (text[close] == '[') {
      pos = close;
      continue;
    }
    if (auto g = parse_list(text.substr(pos + 1, close - pos - 1))) {
      g->begin = pos;
      g->end = close + 1;
      groups.push_back(std::move(*g));
    }
    pos = close + 1;
  }

  std::vector<Group> merged;
  for (auto& g : groups) {
    if (!merged.empty()) {
      Group& prev = merged.back();
      if (is_joiner(text.substr(prev.end, g.begin - prev.end))) {
        std::set<int> joined = prev.indices;
        if (add_range(joined, prev.last, g.first)) {
          joined.insert(g.indices.begin(), g.indices.end());
          prev.indices = std::move(joined);
          prev.last = g.last;
          prev.end = g.end;
          continue;
        }
      }
    }
    merged.push_back(std::move(g));
  }

  const auto spans = sentence_spans(text);
  std::vector<CitationOccurrence> out;
  out.reserve(merged.size());
  for (auto& g : merged) {
    CitationOccurrence occ{std::move(g.indices), g.begin, g.end, {}};
    auto it = std::find_if(spans.begin(), spans.end(),
                           [&](const SentenceSpan& s) { return s.begin <= occ.begin && occ.begin < s.end; });
    if (it != spans.end()) occ.sentence = std::string(text.substr(it->begin, it->end - it->begin));
    out.push_back(std::move(occ));
  }
  return out;
}

std::set<int> cited_set(std::string_view text) {
  std::set<int> out;
  for (const auto& occ : parse_citations(text)) out.insert(occ.indices.begin(), occ.indices.end());
  return out;
}

std::vector<CitationDiagnostic> validate_indices(std::span<const CitationOccurrence> occurrences,
                                                 std::span<const ReferenceEntry> references) {
  std::set<int> known;
  for (const auto& r : references) known.insert(r.index);
  std::vector<CitationDiagnostic> out;
  for (const auto& occ : occurrences) {
    for (int index : occ.indices) {
      if (known.contains(index)) continue;
      out.push_back({index, occ.begin, occ.end,
                     "citation index " + std::to_string(index) + " is not in the reference list"});
    }
  }
  return out;
}

double reference_recall(std::string_view generated, std::string_view reference_intro) {
  const std::set<int> want = cited_set(reference_intro);
  if (want.empty()) return 1.0;
  const std::set<int> have = cited_set(generated);
  std::size_t hit = 0;
  for (int i : want) hit += have.count(i);
  return static_cast<double>(hit) / static_cast<double>(want.size());
}

std::string render_reference_list(std::span<const ReferenceEntry> references) {
  std::vector<const ReferenceEntry*> sorted;
  for (const auto& r : references) sorted.push_back(&r);
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const ReferenceEntry* a, const ReferenceEntry* b) { return a->index < b->index; });
  std::string out;
  for (const ReferenceEntry* r : sorted) out += std::to_string(r->index) + ". " + r->text + "\n";
  return out;
}

}  // namespace lector
