#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "lector/resources.hpp"
#include "lector/text_metrics.hpp"

namespace lector {

namespace {

const std::set<std::string, std::less<>>& stopwords() {
  static const std::set<std::string, std::less<>> table = [] {
    auto lines = resource_lines("stopwords_en.txt");
    return std::set<std::string, std::less<>>(lines.begin(), lines.end());
  }();
  return table;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool starts_upper(std::string_view w) { return !w.empty() && std::isupper(static_cast<unsigned char>(w[0])); }

bool is_acronym(std::string_view w) {
  if (w.size() < 2) return false;
  bool has_upper = false;
  for (char c : w) {
    auto u = static_cast<unsigned char>(c);
    if (std::islower(u)) return false;
    has_upper |= std::isupper(u) != 0;
  }
  return has_upper;
}

double median(const std::vector<std::size_t>& sorted) {
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return static_cast<double>(sorted[n / 2]);
  return (static_cast<double>(sorted[n / 2 - 1]) + static_cast<double>(sorted[n / 2])) / 2.0;
}

struct TermStats {
  std::size_t tf = 0;
  std::size_t capitalized = 0;
  std::size_t acronyms = 0;
  std::vector<std::size_t> sentences;  // distinct, ascending
  std::vector<std::string> left;
  std::vector<std::string> right;
};

double distinct_ratio(const std::vector<std::string>& neighbours) {
  if (neighbours.empty()) return 0.0;
  std::set<std::string_view> distinct(neighbours.begin(), neighbours.end());
  return static_cast<double>(distinct.size()) / static_cast<double>(neighbours.size());
}

}  // namespace

bool is_stopword(std::string_view lowercase_token) { return stopwords().contains(lowercase_token); }

double edit_similarity(std::string_view a, std::string_view b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1] ? 1U : 0U)});
    }
    std::swap(prev, cur);
  }
  const double distance = static_cast<double>(prev[b.size()]);
  return 1.0 - distance / static_cast<double>(std::max(a.size(), b.size()));
}

std::vector<std::string> phrase_texts(std::span<const KeyPhrase> phrases) {
  std::vector<std::string> out;
  out.reserve(phrases.size());
  for (const auto& p : phrases) out.push_back(p.text);
  return out;
}

std::vector<KeyPhrase> extract_keyphrases(std::string_view text, std::size_t k, const KeyphraseOptions& options) {
  if (k == 0) return {};

  std::vector<TokenSeq> sentences;
  for (const auto& s : split_sentences(text)) {
    TokenSeq words = tokenize_cased(s);
    if (!words.empty()) sentences.push_back(std::move(words));
  }
  if (sentences.empty()) return {};

  // Term statistics over lowercase forms.
  std::vector<std::vector<std::string>> lowered(sentences.size());
  std::map<std::string, TermStats, std::less<>> terms;
  for (std::size_t si = 0; si < sentences.size(); ++si) {
    for (const auto& w : sentences[si]) lowered[si].push_back(lower_ascii(w));
    const auto& low = lowered[si];
    for (std::size_t wi = 0; wi < low.size(); ++wi) {
      TermStats& t = terms[low[wi]];
      ++t.tf;
      if (wi > 0 && starts_upper(sentences[si][wi])) ++t.capitalized;
      if (is_acronym(sentences[si][wi])) ++t.acronyms;
      if (t.sentences.empty() || t.sentences.back() != si) t.sentences.push_back(si);
      if (wi > 0) t.left.push_back(low[wi - 1]);
      if (wi + 1 < low.size()) t.right.push_back(low[wi + 1]);
    }
  }

  std::vector<double> content_tf;
  for (const auto& [term, stats] : terms) {
    if (!is_stopword(term)) content_tf.push_back(static_cast<double>(stats.tf));
  }
  if (content_tf.empty()) return {};
  double mean = 0;
  for (double v : content_tf) mean += v;
  mean /= static_cast<double>(content_tf.size());
  double var = 0;
  for (double v : content_tf) var += (v - mean) * (v - mean);
  const double stddev = std::sqrt(var / static_cast<double>(content_tf.size()));
  const double max_tf = *std::max_element(content_tf.begin(), content_tf.end());
  const double sentence_count = static_cast<double>(sentences.size());

  std::map<std::string, double, std::less<>> score;
  for (const auto& [term, t] : terms) {
    const double tf = static_cast<double>(t.tf);
    const double w_case = static_cast<double>(std::max(t.capitalized, t.acronyms)) / (1.0 + std::log(tf));
    const double w_pos = std::log(std::log(3.0 + median(t.sentences)));
    const double w_freq = tf / (mean + stddev);
    const double w_rel = 1.0 + (distinct_ratio(t.left) + distinct_ratio(t.right)) * tf / max_tf;
    const double w_spread = static_cast<double>(t.sentences.size()) / sentence_count;
    score[term] = (w_rel * w_pos) / (w_case + w_freq / w_rel + w_spread / w_rel);
  }

  // Candidate windows that neither start nor end with a stopword.
  std::map<std::string, std::pair<std::size_t, std::vector<std::string>>> candidates;
  for (const auto& low : lowered) {
    for (std::size_t n = 1; n <= options.max_ngram; ++n) {
      for (std::size_t i = 0; i + n <= low.size(); ++i) {
        if (is_stopword(low[i]) || is_stopword(low[i + n - 1])) continue;
        std::string key = low[i];
        for (std::size_t j = 1; j < n; ++j) key += " " + low[i + j];
        auto& entry = candidates[key];
        if (entry.first++ == 0) entry.second.assign(low.begin() + static_cast<std::ptrdiff_t>(i),
                                                    low.begin() + static_cast<std::ptrdiff_t>(i + n));
      }
    }
  }

  std::vector<KeyPhrase> ranked;
  ranked.reserve(candidates.size());
  for (const auto& [phrase, entry] : candidates) {
    double product = 1.0;
    double sum = 0.0;
    for (const auto& token : entry.second) {
      const double s = score.find(token)->second;
      product *= s;
      sum += s;
    }
    ranked.push_back({phrase, product / (static_cast<double>(entry.first) * (1.0 + sum))});
  }
  std::sort(ranked.begin(), ranked.end(), [](const KeyPhrase& a, const KeyPhrase& b) {
    return a.score != b.score ? a.score < b.score : a.text < b.text;
  });

  std::vector<KeyPhrase> kept;
  for (auto& candidate : ranked) {
    bool near_duplicate = std::any_of(kept.begin(), kept.end(), [&](const KeyPhrase& p) {
      return edit_similarity(candidate.text, p.text) >= options.dedup_threshold;
    });
    if (near_duplicate) continue;
    kept.push_back(std::move(candidate));
    if (kept.size() == k) break;
  }
  return kept;
}

}  // namespace lector
