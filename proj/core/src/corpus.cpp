#include "lector/corpus.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "lector/errors.hpp"

namespace lector {

namespace {

using json = nlohmann::json;

const std::set<std::string_view> kPaperFields = {"id",         "methods",    "results",
                                                  "analyses",   "discussion", "references",
                                                  "reference_introduction"};

std::string field_error(std::string_view origin, std::string_view field, std::string_view problem) {
  return std::string(origin) + ": field '" + std::string(field) + "' " + std::string(problem);
}

std::string required_string(const json& doc, std::string_view origin, const char* field, bool allow_empty) {
  auto it = doc.find(field);
  if (it == doc.end()) throw DataError(field_error(origin, field, "is missing"));
  if (!it->is_string()) throw DataError(field_error(origin, field, "must be a string"));
  std::string value = it->get<std::string>();
  if (!allow_empty && value.empty()) throw DataError(field_error(origin, field, "must not be empty"));
  return value;
}

bool safe_id(std::string_view id) {
  if (id.empty() || id.front() == '.') return false;
  return std::all_of(id.begin(), id.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  });
}

}  // namespace

std::string PaperRecord::body() const {
  std::string out;
  for (const std::string* part : {&methods, &results, &analyses}) {
    if (part->empty()) continue;
    if (!out.empty()) out += "\n\n";
    out += *part;
  }
  return out;
}

PaperRecord parse_paper(std::string_view json_text, std::string_view origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string(origin) + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw DataError(std::string(origin) + ": paper record must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (!kPaperFields.contains(key)) throw DataError(field_error(origin, key, "is not recognised"));
  }

  PaperRecord paper;
  paper.id = required_string(doc, origin, "id", false);
  paper.methods = required_string(doc, origin, "methods", true);
  paper.results = required_string(doc, origin, "results", true);
  paper.analyses = required_string(doc, origin, "analyses", true);
  if (doc.contains("discussion")) {
    std::string discussion = required_string(doc, origin, "discussion", true);
    if (!discussion.empty()) paper.analyses += (paper.analyses.empty() ? "" : "\n\n") + discussion;
  }
  paper.reference_introduction = required_string(doc, origin, "reference_introduction", false);

  auto refs = doc.find("references");
  if (refs == doc.end()) throw DataError(field_error(origin, "references", "is missing"));
  if (!refs->is_array()) throw DataError(field_error(origin, "references", "must be an array"));
  std::set<int> seen;
  for (std::size_t i = 0; i < refs->size(); ++i) {
    const json& entry = (*refs)[i];
    const std::string where = "references[" + std::to_string(i) + "]";
    if (!entry.is_object()) throw DataError(field_error(origin, where, "must be an object"));
    auto index = entry.find("index");
    if (index == entry.end() || !index->is_number_integer() || index->get<long long>() <= 0 ||
        index->get<long long>() > 1'000'000'000) {
      throw DataError(field_error(origin, where + ".index", "must be a positive integer"));
    }
    auto text = entry.find("text");
    if (text == entry.end() || !text->is_string() || text->get<std::string>().empty()) {
      throw DataError(field_error(origin, where + ".text", "must be a non-empty string"));
    }
    const int idx = index->get<int>();
    if (!seen.insert(idx).second) {
      throw DataError(field_error(origin, where + ".index", "duplicates index " + std::to_string(idx)));
    }
    paper.references.push_back({idx, text->get<std::string>()});
  }
  return paper;
}

PaperRecord load_paper(const std::filesystem::path& path) { return parse_paper(read_file(path), path.string()); }

std::string serialize_paper(const PaperRecord& paper) {
  nlohmann::ordered_json doc;
  doc["id"] = paper.id;
  doc["methods"] = paper.methods;
  doc["results"] = paper.results;
  doc["analyses"] = paper.analyses;
  doc["references"] = nlohmann::ordered_json::array();
  for (const auto& r : paper.references) doc["references"].push_back({{"index", r.index}, {"text", r.text}});
  doc["reference_introduction"] = paper.reference_introduction;
  return doc.dump(2) + "\n";
}

void save_paper(const PaperRecord& paper, const std::filesystem::path& path) {
  write_file_atomic(path, serialize_paper(paper));
}

CorpusManifest load_manifest(const std::filesystem::path& path) {
  const std::string origin = path.string();
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(origin + ": invalid JSON: " + e.what());
  }
  if (!doc.is_object()) throw DataError(origin + ": manifest must map split names to id lists");

  CorpusManifest manifest;
  std::map<std::string, std::string> owner;  // id -> split
  for (const auto& [split, ids] : doc.items()) {
    if (!ids.is_array()) throw DataError(origin + ": split '" + split + "' must be an array of ids");
    auto& list = manifest.splits[split];
    for (const auto& id : ids) {
      if (!id.is_string() || !safe_id(id.get<std::string>())) {
        throw DataError(origin + ": split '" + split + "' contains an invalid id " + id.dump());
      }
      const std::string value = id.get<std::string>();
      auto [it, inserted] = owner.emplace(value, split);
      if (!inserted) {
        throw DataError(origin + ": id '" + value + "' appears in both '" + it->second + "' and '" + split + "'");
      }
      list.push_back(value);
    }
  }
  return manifest;
}

std::vector<std::string> Corpus::split(std::string_view name) const {
  auto it = manifest.splits.find(std::string(name));
  if (it == manifest.splits.end()) throw DataError("unknown split '" + std::string(name) + "'");
  std::vector<std::string> ids = it->second;
  std::sort(ids.begin(), ids.end());
  return ids;
}

const PaperRecord& Corpus::paper(std::string_view id) const {
  auto it = papers.find(std::string(id));
  if (it == papers.end()) throw DataError("unknown paper id '" + std::string(id) + "'");
  return it->second;
}

Corpus load_corpus(const std::filesystem::path& directory, const std::filesystem::path& manifest_path) {
  Corpus corpus;
  corpus.manifest = load_manifest(manifest_path);
  for (const auto& [split, ids] : corpus.manifest.splits) {
    for (const auto& id : ids) {
      const auto path = directory / (id + ".json");
      std::error_code ec;
      if (!std::filesystem::is_regular_file(path, ec)) {
        throw DataError("manifest split '" + split + "' names '" + id + "' but " + path.string() + " does not exist");
      }
      PaperRecord paper = load_paper(path);
      if (paper.id != id) {
        throw DataError(path.string() + ": record id '" + paper.id + "' does not match file name '" + id + "'");
      }
      corpus.papers.emplace(id, std::move(paper));
    }
  }
  return corpus;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  static std::atomic<unsigned long> counter{0};
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ostringstream suffix;
  suffix << ".tmp." << ::getpid() << "." << std::this_thread::get_id() << "." << counter++;
  std::filesystem::path temp = path;
  temp += suffix.str();
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + temp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) {
      std::filesystem::remove(temp);
      throw Error("failed writing " + temp.string());
    }
  }
  std::filesystem::rename(temp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace lector
