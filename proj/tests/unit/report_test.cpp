#include <gtest/gtest.h>

#include "json.hpp"
#include "lector/errors.hpp"
#include "lector/report.hpp"

namespace lector {
namespace {

PaperRow ok_row(std::string id, double value) {
  PaperRow row;
  row.paper_id = std::move(id);
  row.ok = true;
  row.result.metrics.values.fill(value);
  row.result.reward = compose(row.result.metrics);
  return row;
}

TEST(Aggregate, MeansOverSuccessfulRowsOnly) {
  PaperRow failed;
  failed.paper_id = "bad";
  failed.error = "boom";
  const Aggregates a = aggregate({ok_row("a", 0.25), failed, ok_row("b", 0.75)});
  EXPECT_EQ(a.evaluated, 2u);
  EXPECT_DOUBLE_EQ(a.op, 0.5);
  for (double g : a.groups) EXPECT_DOUBLE_EQ(g, 0.5);
  EXPECT_DOUBLE_EQ(a.total_reward, 2.5);
  EXPECT_EQ(aggregate({failed}).evaluated, 0u);
}

TEST(Report, JsonlAndSummaryShapes) {
  EvaluationReport report;
  report.system = "sys";
  report.split = "test";
  report.rows = {ok_row("a", 0.5)};
  PaperRow failed;
  failed.paper_id = "b";
  failed.error = "no trajectory";
  report.rows.push_back(failed);
  report.rows[0].result.metrics.flags[0] = MetricFlag::kDegenerate;
  report.aggregates = aggregate(report.rows);

  const std::string jsonl = rows_to_jsonl(report);
  ASSERT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 2);
  const auto first = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
  EXPECT_EQ(first.at("paper_id"), "a");
  EXPECT_EQ(first.at("metrics").size(), kMetricCount);
  EXPECT_EQ(first.at("flags").at("reasoning_edge_accuracy"), "degenerate");
  EXPECT_EQ(first.at("flags").size(), 1u);
  EXPECT_DOUBLE_EQ(first.at("groups").at("WQ").get<double>(), 0.5);
  const auto second = nlohmann::json::parse(jsonl.substr(jsonl.find('\n') + 1));
  EXPECT_EQ(second.at("ok"), false);
  EXPECT_EQ(second.at("error"), "no trajectory");

  const auto summary = nlohmann::json::parse(summary_to_json(report));
  EXPECT_EQ(summary.at("papers"), 2);
  EXPECT_EQ(summary.at("evaluated"), 1);
  EXPECT_EQ(summary.at("failures"), 1);
  EXPECT_EQ(report.failures(), 1u);

  const auto rows = parse_summaries(summary_to_json(report));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].system, "sys");
  EXPECT_DOUBLE_EQ(rows[0].op, 0.5);
}

TEST(Report, TableFormats) {
  SummaryRow a{"lector", "test", {0.7454, 0.5, 0.25, 0.834, 1.0}, 0.6651, 3, 0};
  SummaryRow b{"base, v2", "test", {0, 0, 0, 0, 0}, 0, 3, 1};
  const std::string text = render_table({a, b});
  EXPECT_EQ(text,
            "system    split     GQ     GW     PC     WQ     CQ     OP\n"
            "lector    test   0.745  0.500  0.250  0.834  1.000  0.665\n"
            "base, v2  test   0.000  0.000  0.000  0.000  0.000  0.000\n");
  const std::string csv = render_table({b}, TableFormat::kCsv);
  EXPECT_EQ(csv, "system,split,GQ,GW,PC,WQ,CQ,OP\n\"base, v2\",test,0.000,0.000,0.000,0.000,0.000,0.000\n");
  const std::string tsv = render_table({a}, TableFormat::kTsv);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "system\tsplit\tGQ\tGW\tPC\tWQ\tCQ\tOP");
}

TEST(Report, ParseSummariesRejectsMalformed) {
  EXPECT_THROW(parse_summaries("{"), DataError);
  EXPECT_THROW(parse_summaries(R"({"system": "x"})"), DataError);
  EXPECT_TRUE(parse_summaries("[]").empty());
}

}  // namespace
}  // namespace lector
