#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "lector/citations.hpp"

namespace lector {

/// Conditioning body (methods, results, analyses, citations) plus the
/// reference introduction.
struct PaperRecord {
  std::string id;
  std::string methods;
  std::string results;
  std::string analyses;
  std::vector<ReferenceEntry> references;
  std::string reference_introduction;

  /// methods, results and analyses joined by blank lines, empty parts skipped.
  std::string body() const;

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

/// Parses and validates a record. An optional "discussion" field is appended
/// to `analyses`. Throws DataError naming the offending field.
PaperRecord parse_paper(std::string_view json_text, std::string_view origin = "<memory>");
PaperRecord load_paper(const std::filesystem::path& path);

/// Canonical file form: fixed key order, two-space indent, trailing newline.
std::string serialize_paper(const PaperRecord& paper);
void save_paper(const PaperRecord& paper, const std::filesystem::path& path);

struct CorpusManifest {
  std::map<std::string, std::vector<std::string>> splits;
};

CorpusManifest load_manifest(const std::filesystem::path& path);

struct Corpus {
  std::map<std::string, PaperRecord> papers;  // iteration order is by id
  CorpusManifest manifest;

  /// Ids of a split in ascending order. Throws DataError for unknown splits.
  std::vector<std::string> split(std::string_view name) const;
  const PaperRecord& paper(std::string_view id) const;
};

/// Loads `<directory>/<id>.json` for every id named in the manifest. Throws
/// DataError on dangling ids, ids shared between splits, or an id that does
/// not match its file.
Corpus load_corpus(const std::filesystem::path& directory, const std::filesystem::path& manifest_path);

/// Writes `contents` to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace lector
