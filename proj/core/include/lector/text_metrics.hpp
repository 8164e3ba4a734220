#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lector {

using TokenSeq = std::vector<std::string>;

/// Lowercases ASCII and splits on every maximal run of characters that are not
/// ASCII alphanumerics. Non-ASCII letters (Latin, Greek, Cyrillic ranges) count
/// as alphanumeric and are kept verbatim; all other code points separate.
TokenSeq tokenize(std::string_view text);

/// Same split as `tokenize` but keeps the original casing.
TokenSeq tokenize_cased(std::string_view text);

struct SentenceSpan {
  std::size_t begin = 0;  // byte offsets into the source, [begin, end)
  std::size_t end = 0;
};

/// Sentence boundaries after '.', '!' or '?' followed by whitespace or end of
/// text, except after a listed abbreviation ("et al.", "Fig.", ...). Spans are
/// trimmed and never empty.
std::vector<SentenceSpan> sentence_spans(std::string_view text);
std::vector<std::string> split_sentences(std::string_view text);

// ---------------------------------------------------------------------------
// BLEU
// ---------------------------------------------------------------------------

struct BleuStats {
  std::array<std::size_t, 4> matches{};  // clipped n-gram matches
  std::array<std::size_t, 4> totals{};   // candidate n-gram counts
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;
};

BleuStats bleu_stats(const TokenSeq& candidate, const TokenSeq& reference);

/// Sentence BLEU-4, uniform weights. Any p_n (n >= 2) with no matches is
/// smoothed to (m + 1) / (t + 1). 0 when either side has no tokens.
double bleu(const TokenSeq& candidate, const TokenSeq& reference);
double bleu(std::string_view candidate, std::string_view reference);

// ---------------------------------------------------------------------------
// Keyphrases
// ---------------------------------------------------------------------------

struct KeyPhrase {
  std::string text;  // lowercase tokens joined by single spaces
  double score = 0;  // lower is more important

  friend bool operator==(const KeyPhrase&, const KeyPhrase&) = default;
};

struct KeyphraseOptions {
  std::size_t max_ngram = 3;
  double dedup_threshold = 0.9;
};

inline constexpr std::size_t kDefaultKeyphraseCount = 20;

/// Statistical single-document keyphrase extraction (YAKE-style scoring).
std::vector<KeyPhrase> extract_keyphrases(std::string_view text, std::size_t k,
                                          const KeyphraseOptions& options = {});

std::vector<std::string> phrase_texts(std::span<const KeyPhrase> phrases);

bool is_stopword(std::string_view lowercase_token);

/// 1 - levenshtein(a, b) / max(|a|, |b|); 1 for two empty strings.
double edit_similarity(std::string_view a, std::string_view b);

// ---------------------------------------------------------------------------
// Coverage
// ---------------------------------------------------------------------------

struct CoverageOptions {
  /// Token-Jaccard matching against same-length windows instead of exact
  /// contiguous matching.
  bool fuzzy = false;
  double fuzzy_threshold = 0.5;
};

/// Fraction of `phrases` whose tokens occur contiguously in `target`.
/// An empty phrase list covers fully.
double phrase_coverage(std::span<const std::string> phrases, std::string_view target,
                       const CoverageOptions& options = {});

/// True when `needle` occurs as a contiguous run inside `haystack`.
bool contains_subsequence(const TokenSeq& haystack, const TokenSeq& needle);

/// |set(tokens(premise)) ∩ set(tokens(hypothesis))| / |set(tokens(hypothesis))|,
/// 0 when the hypothesis has no tokens. Drives the offline mock rules.
double overlap_ratio(std::string_view premise, std::string_view hypothesis);

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

struct Embedding {
  std::vector<double> values;

  std::size_t dimension() const { return values.size(); }
};

/// Raw cosine clamped below at 0. Throws std::invalid_argument on dimension
/// mismatch, empty or all-zero vectors.
double cosine01(const Embedding& a, const Embedding& b);

}  // namespace lector
