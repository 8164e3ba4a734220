#include "lector/text_metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "lector/resources.hpp"

namespace lector {

namespace {

/// Decodes one UTF-8 code point at `pos`; returns its length (1 for invalid
/// bytes, reported as U+FFFD).
std::size_t decode(std::string_view s, std::size_t pos, char32_t& cp) {
  auto byte = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char b0 = byte(pos);
  std::size_t len = b0 < 0x80 ? 1 : (b0 >> 5) == 0x6 ? 2 : (b0 >> 4) == 0xE ? 3 : (b0 >> 3) == 0x1E ? 4 : 0;
  if (len == 0 || pos + len > s.size()) {
    cp = 0xFFFD;
    return 1;
  }
  if (len == 1) {
    cp = b0;
    return 1;
  }
  cp = b0 & (0xFF >> (len + 1));
  for (std::size_t i = 1; i < len; ++i) {
    if ((byte(pos + i) & 0xC0) != 0x80) {
      cp = 0xFFFD;
      return 1;
    }
    cp = (cp << 6) | (byte(pos + i) & 0x3F);
  }
  return len;
}

bool word_code_point(char32_t cp) {
  if (cp < 0x80) return std::isalnum(static_cast<int>(cp)) != 0;
  if (cp >= 0x00C0 && cp <= 0x024F) return cp != 0x00D7 && cp != 0x00F7;  // Latin-1 supplement, Latin extended
  if (cp >= 0x0370 && cp <= 0x03FF) return cp != 0x037E && cp != 0x0387;  // Greek
  if (cp >= 0x0400 && cp <= 0x04FF) return true;                          // Cyrillic
  return false;
}

TokenSeq split_words(std::string_view text, bool lowercase) {
  TokenSeq tokens;
  std::string current;
  for (std::size_t pos = 0; pos < text.size();) {
    char32_t cp = 0;
    std::size_t len = decode(text, pos, cp);
    if (word_code_point(cp)) {
      if (cp < 0x80) {
        char c = static_cast<char>(cp);
        current.push_back(lowercase ? static_cast<char>(std::tolower(static_cast<unsigned char>(c))) : c);
      } else {
        current.append(text.substr(pos, len));
      }
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
    pos += len;
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

const std::set<std::string, std::less<>>& abbreviations() {
  static const std::set<std::string, std::less<>> table = [] {
    auto lines = resource_lines("abbreviations_en.txt");
    return std::set<std::string, std::less<>>(lines.begin(), lines.end());
  }();
  return table;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

bool ends_with_abbreviation(std::string_view text, std::size_t period) {
  std::size_t start = period;
  while (start > 0 && !is_space(text[start - 1])) --start;
  std::string word;
  for (std::size_t i = start; i <= period; ++i) {
    word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
  }
  // Drop opening punctuation such as "(Fig."
  auto first = word.find_first_not_of("([{\"'");
  if (first == std::string::npos) return false;
  return abbreviations().contains(std::string_view(word).substr(first));
}

void push_trimmed(std::vector<SentenceSpan>& out, std::string_view text, std::size_t begin, std::size_t end) {
  while (begin < end && is_space(text[begin])) ++begin;
  while (end > begin && is_space(text[end - 1])) --end;
  if (begin < end) out.push_back({begin, end});
}

std::string join_key(const TokenSeq& tokens, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) key.push_back('\x1f');
    key += tokens[start + i];
  }
  return key;
}

}  // namespace

TokenSeq tokenize(std::string_view text) { return split_words(text, true); }

TokenSeq tokenize_cased(std::string_view text) { return split_words(text, false); }

std::vector<SentenceSpan> sentence_spans(std::string_view text) {
  std::vector<SentenceSpan> spans;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (c != '.' && c != '!' && c != '?') continue;
    if (i + 1 < text.size() && !is_space(text[i + 1])) continue;
    if (c == '.' && ends_with_abbreviation(text, i)) continue;
    push_trimmed(spans, text, start, i + 1);
    start = i + 1;
  }
  push_trimmed(spans, text, start, text.size());
  return spans;
}

std::vector<std::string> split_sentences(std::string_view text) {
  std::vector<std::string> out;
  for (const auto& span : sentence_spans(text)) out.emplace_back(text.substr(span.begin, span.end - span.begin));
  return out;
}

// ---------------------------------------------------------------------------
// BLEU
// ---------------------------------------------------------------------------

BleuStats bleu_stats(const TokenSeq& candidate, const TokenSeq& reference) {
  BleuStats stats;
  stats.candidate_length = candidate.size();
  stats.reference_length = reference.size();
  for (std::size_t n = 1; n <= 4; ++n) {
    std::unordered_map<std::string, std::size_t> ref_counts;
    for (std::size_t i = 0; i + n <= reference.size(); ++i) ++ref_counts[join_key(reference, i, n)];
    std::unordered_map<std::string, std::size_t> cand_counts;
    for (std::size_t i = 0; i + n <= candidate.size(); ++i) ++cand_counts[join_key(candidate, i, n)];

    std::size_t matches = 0;
    for (const auto& [gram, count] : cand_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matches += std::min(count, it->second);
    }
    stats.matches[n - 1] = matches;
    stats.totals[n - 1] = candidate.size() >= n ? candidate.size() - n + 1 : 0;
  }
  return stats;
}

double bleu(const TokenSeq& candidate, const TokenSeq& reference) {
  if (candidate.empty() || reference.empty()) return 0.0;
  const BleuStats s = bleu_stats(candidate, reference);
  if (s.matches[0] == 0) return 0.0;

  double log_sum = 0.0;
  for (std::size_t n = 0; n < 4; ++n) {
    double m = static_cast<double>(s.matches[n]);
    double t = static_cast<double>(s.totals[n]);
    if (n > 0 && s.matches[n] == 0) {
      m += 1.0;
      t += 1.0;
    }
    log_sum += std::log(m / t);
  }
  const double c = static_cast<double>(s.candidate_length);
  const double r = static_cast<double>(s.reference_length);
  const double brevity = c < r ? std::exp(1.0 - r / c) : 1.0;
  return brevity * std::exp(log_sum / 4.0);
}

double bleu(std::string_view candidate, std::string_view reference) {
  return bleu(tokenize(candidate), tokenize(reference));
}

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

bool contains_subsequence(const TokenSeq& haystack, const TokenSeq& needle) {
  if (needle.empty()) return true;
  return std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end()) != haystack.end();
}

namespace {

double jaccard(const std::set<std::string_view>& a, const std::set<std::string_view>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::size_t common = 0;
  for (auto x : a) common += b.count(x);
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

bool fuzzy_contains(const TokenSeq& haystack, const TokenSeq& needle, double threshold) {
  if (needle.empty()) return true;
  const std::set<std::string_view> want(needle.begin(), needle.end());
  const std::size_t width = std::min(needle.size(), haystack.size());
  if (width == 0) return false;
  for (std::size_t i = 0; i + width <= haystack.size(); ++i) {
    std::set<std::string_view> window(haystack.begin() + static_cast<std::ptrdiff_t>(i),
                                      haystack.begin() + static_cast<std::ptrdiff_t>(i + width));
    if (jaccard(want, window) >= threshold) return true;
  }
  return false;
}

}  // namespace

double phrase_coverage(std::span<const std::string> phrases, std::string_view target,
                       const CoverageOptions& options) {
  if (phrases.empty()) return 1.0;
  const TokenSeq target_tokens = tokenize(target);
  std::size_t covered = 0;
  for (const auto& phrase : phrases) {
    const TokenSeq p = tokenize(phrase);
    bool hit = options.fuzzy ? fuzzy_contains(target_tokens, p, options.fuzzy_threshold)
                             : contains_subsequence(target_tokens, p);
    covered += hit ? 1 : 0;
  }
  return static_cast<double>(covered) / static_cast<double>(phrases.size());
}

double overlap_ratio(std::string_view premise, std::string_view hypothesis) {
  const TokenSeq p = tokenize(premise);
  const TokenSeq h = tokenize(hypothesis);
  const std::set<std::string_view> ps(p.begin(), p.end());
  const std::set<std::string_view> hs(h.begin(), h.end());
  if (hs.empty()) return 0.0;
  std::size_t common = 0;
  for (auto t : hs) common += ps.count(t);
  return static_cast<double>(common) / static_cast<double>(hs.size());
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

double cosine01(const Embedding& a, const Embedding& b) {
  if (a.dimension() != b.dimension()) {
    throw std::invalid_argument("embedding dimensions differ: " + std::to_string(a.dimension()) + " vs " +
                                std::to_string(b.dimension()));
  }
  if (a.dimension() == 0) throw std::invalid_argument("empty embedding");
  double dot = 0, na = 0, nb = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0 || nb == 0) throw std::invalid_argument("zero-length embedding");
  double cosine = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(cosine, 0.0, 1.0);
}

}  // namespace lector
