#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "lector/reward_engine.hpp"

namespace lector {

struct PaperRow {
  std::string paper_id;
  bool ok = false;
  std::string error;  // set when !ok
  EvaluationResult result;
};

struct Aggregates {
  std::array<double, kMetricCount> metrics{};
  std::array<double, kGroupCount> groups{};
  double op = 0;
  double total_reward = 0;
  std::size_t evaluated = 0;
};

/// Means over the rows with ok == true.
Aggregates aggregate(const std::vector<PaperRow>& rows);

struct EvaluationReport {
  std::string system;
  std::string split;
  std::vector<PaperRow> rows;  // sorted by paper id
  Aggregates aggregates;

  std::size_t failures() const;
};

/// One JSON object per row, newline terminated, in row order.
std::string rows_to_jsonl(const EvaluationReport& report);
std::string row_to_json(const PaperRow& row);
std::string summary_to_json(const EvaluationReport& report);

/// One line of the group-score table.
struct SummaryRow {
  std::string system;
  std::string split;
  std::array<double, kGroupCount> groups{};
  double op = 0;
  std::size_t papers = 0;
  std::size_t failures = 0;
};

/// Accepts one summary object or an array of them. Throws DataError.
std::vector<SummaryRow> parse_summaries(std::string_view json_text);

enum class TableFormat { kText, kCsv, kTsv };

/// Columns: system, split, GQ, GW, PC, WQ, CQ, OP; scores to three decimals.
std::string render_table(const std::vector<SummaryRow>& rows, TableFormat format = TableFormat::kText);

}  // namespace lector
