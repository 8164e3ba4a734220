#include "lector/report.hpp"

#include <algorithm>
#include <cstdio>

#include "json.hpp"
#include "lector/errors.hpp"

namespace lector {

namespace {

using ojson = nlohmann::ordered_json;

ojson groups_json(const std::array<double, kGroupCount>& groups) {
  ojson out = ojson::object();
  for (std::size_t g = 0; g < kGroupCount; ++g) out[std::string(to_string(static_cast<MetricGroup>(g)))] = groups[g];
  return out;
}

ojson row_json(const PaperRow& row) {
  ojson j;
  j["paper_id"] = row.paper_id;
  j["ok"] = row.ok;
  if (!row.ok) {
    j["error"] = row.error;
    return j;
  }
  const EvaluationResult& r = row.result;
  ojson metrics = ojson::object();
  ojson flags = ojson::object();
  for (const auto& m : metric_table()) {
    metrics[std::string(m.name)] = r.metrics[m.metric];
    if (r.metrics.flag(m.metric) != MetricFlag::kNone) {
      flags[std::string(m.name)] = std::string(to_string(r.metrics.flag(m.metric)));
    }
  }
  j["metrics"] = std::move(metrics);
  j["flags"] = std::move(flags);
  j["groups"] = groups_json(r.reward.groups);
  j["op"] = r.reward.op;
  j["total_reward"] = r.reward.total_reward;
  ojson diagnostics = ojson::array();
  for (const auto& d : r.validation.diagnostics) {
    diagnostics.push_back({{"code", to_string(d.code)}, {"location", d.location}});
  }
  j["graph"] = {{"valid", r.validation.valid()}, {"diagnostics", std::move(diagnostics)}};
  return j;
}

std::string fixed3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

std::string tsv_field(std::string s) {
  std::replace_if(s.begin(), s.end(), [](char c) { return c == '\t' || c == '\n' || c == '\r'; }, ' ');
  return s;
}

}  // namespace

Aggregates aggregate(const std::vector<PaperRow>& rows) {
  Aggregates a;
  for (const auto& row : rows) {
    if (!row.ok) continue;
    ++a.evaluated;
    for (std::size_t i = 0; i < kMetricCount; ++i) a.metrics[i] += row.result.metrics.values[i];
    for (std::size_t g = 0; g < kGroupCount; ++g) a.groups[g] += row.result.reward.groups[g];
    a.op += row.result.reward.op;
    a.total_reward += row.result.reward.total_reward;
  }
  if (a.evaluated == 0) return a;
  const double n = static_cast<double>(a.evaluated);
  for (double& v : a.metrics) v /= n;
  for (double& v : a.groups) v /= n;
  a.op /= n;
  a.total_reward /= n;
  return a;
}

std::size_t EvaluationReport::failures() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const PaperRow& r) { return !r.ok; }));
}

std::string row_to_json(const PaperRow& row) { return row_json(row).dump(); }

std::string rows_to_jsonl(const EvaluationReport& report) {
  std::string out;
  for (const auto& row : report.rows) out += row_to_json(row) + "\n";
  return out;
}

std::string summary_to_json(const EvaluationReport& report) {
  ojson j;
  j["system"] = report.system;
  j["split"] = report.split;
  j["papers"] = report.rows.size();
  j["evaluated"] = report.aggregates.evaluated;
  j["failures"] = report.failures();
  ojson metrics = ojson::object();
  for (const auto& m : metric_table()) {
    metrics[std::string(m.name)] = report.aggregates.metrics[static_cast<std::size_t>(m.metric)];
  }
  j["metrics"] = std::move(metrics);
  j["groups"] = groups_json(report.aggregates.groups);
  j["op"] = report.aggregates.op;
  j["total_reward"] = report.aggregates.total_reward;
  return j.dump(2) + "\n";
}

std::vector<SummaryRow> parse_summaries(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw DataError(std::string("malformed report: ") + e.what());
  }
  std::vector<nlohmann::json> items;
  if (doc.is_array()) {
    items.assign(doc.begin(), doc.end());
  } else {
    items.push_back(doc);
  }

  std::vector<SummaryRow> rows;
  for (const auto& item : items) {
    try {
      SummaryRow row;
      row.system = item.at("system").get<std::string>();
      row.split = item.at("split").get<std::string>();
      for (std::size_t g = 0; g < kGroupCount; ++g) {
        row.groups[g] = item.at("groups").at(std::string(to_string(static_cast<MetricGroup>(g)))).get<double>();
      }
      row.op = item.at("op").get<double>();
      row.papers = item.at("papers").get<std::size_t>();
      row.failures = item.at("failures").get<std::size_t>();
      rows.push_back(std::move(row));
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("malformed report: ") + e.what());
    }
  }
  return rows;
}

std::string render_table(const std::vector<SummaryRow>& rows, TableFormat format) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back({"system", "split", "GQ", "GW", "PC", "WQ", "CQ", "OP"});
  for (const auto& r : rows) {
    std::vector<std::string> line{r.system, r.split};
    for (double g : r.groups) line.push_back(fixed3(g));
    line.push_back(fixed3(r.op));
    cells.push_back(std::move(line));
  }

  std::string out;
  if (format != TableFormat::kText) {
    const char sep = format == TableFormat::kCsv ? ',' : '\t';
    for (const auto& line : cells) {
      for (std::size_t c = 0; c < line.size(); ++c) {
        if (c) out.push_back(sep);
        out += format == TableFormat::kCsv ? csv_field(line[c]) : tsv_field(line[c]);
      }
      out.push_back('\n');
    }
    return out;
  }

  std::vector<std::size_t> width(cells.front().size(), 0);
  for (const auto& line : cells) {
    for (std::size_t c = 0; c < line.size(); ++c) width[c] = std::max(width[c], line[c].size());
  }
  for (const auto& line : cells) {
    std::string text;
    for (std::size_t c = 0; c < line.size(); ++c) {
      if (c) text += "  ";
      const std::string pad(width[c] - line[c].size(), ' ');
      text += c < 2 ? line[c] + pad : pad + line[c];
    }
    while (!text.empty() && text.back() == ' ') text.pop_back();
    out += text + "\n";
  }
  return out;
}

}  // namespace lector
