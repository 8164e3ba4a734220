#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lector/corpus.hpp"
#include "lector/errors.hpp"
#include "lector/pipeline.hpp"
#include "lector/reasoning_graph.hpp"
#include "lector/report.hpp"
#include "lector/run_config.hpp"

namespace {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kData = 3,
  kEndpoint = 4,
  kParseOnly = 5,
};

struct GlobalOptions {
  std::string config_path;
  bool mock = false;
  std::optional<int> parallelism;
  std::string cache_dir;
  std::string out_dir;
  std::string corpus_dir;
  std::string manifest;
  std::string template_dir;
};

lector::RunConfig resolve_config(const GlobalOptions& g) {
  lector::RunConfig config = g.config_path.empty() ? lector::RunConfig{} : lector::load_run_config(g.config_path);
  if (g.mock) config.mock = true;
  if (g.parallelism) config.parallelism = *g.parallelism;
  if (!g.cache_dir.empty()) config.cache_dir = g.cache_dir;
  if (!g.out_dir.empty()) config.out_dir = g.out_dir;
  if (!g.corpus_dir.empty()) {
    config.corpus_dir = g.corpus_dir;
    if (g.manifest.empty()) config.manifest = config.corpus_dir / "manifest.json";
  }
  if (!g.manifest.empty()) config.manifest = g.manifest;
  if (!g.template_dir.empty()) config.template_dir = g.template_dir;
  config.validate();
  return config;
}

lector::Pipeline make_pipeline(const GlobalOptions& g) {
  lector::RunConfig config = resolve_config(g);
  lector::PipelineServices services = lector::make_services(config);
  return lector::Pipeline(std::move(config), std::move(services));
}

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  return lector::read_file(path);
}

int cmd_validate_graph(const std::string& path, bool as_json) {
  const lector::ValidationReport report = lector::check_dot(read_input(path));
  if (as_json) {
    std::cout << report.to_json();
  } else if (report.valid()) {
    std::cout << path << ": valid\n";
  } else {
    for (const auto& d : report.diagnostics) {
      std::cout << path << ": " << lector::to_string(d.code) << " at " << d.location << ": " << d.message << "\n";
    }
  }
  return report.valid() ? kOk : kData;
}

int cmd_extract(const GlobalOptions& g, const std::vector<std::string>& ids) {
  lector::Pipeline pipeline = make_pipeline(g);
  int rc = kOk;
  for (const auto& id : ids) {
    try {
      const lector::ExtractOutcome outcome = pipeline.extract(id);
      const auto art = lector::artifacts_for(pipeline.config().out_dir, id);
      std::cout << id << ": " << outcome.graph.nodes.size() << " nodes, " << outcome.graph.edges.size() << " edges, "
                << (outcome.report.valid() ? "valid" : "invalid") << " -> " << art.graph.string() << "\n";
      for (const auto& d : outcome.report.diagnostics) {
        std::cout << "  " << lector::to_string(d.code) << " at " << d.location << ": " << d.message << "\n";
      }
    } catch (const lector::GraphParseFailure& e) {
      std::cerr << "lector: " << e.what() << "\n";
      rc = kParseOnly;
    }
  }
  return rc;
}

int cmd_write(const GlobalOptions& g, const std::string& id, const std::string& graph) {
  lector::Pipeline pipeline = make_pipeline(g);
  pipeline.write(id, graph);
  std::cout << lector::artifacts_for(pipeline.config().out_dir, id).introduction.string() << "\n";
  return kOk;
}

int cmd_evaluate(const GlobalOptions& g, const std::string& split, bool generate) {
  lector::Pipeline pipeline = make_pipeline(g);
  const lector::EvaluationReport report = pipeline.evaluate(split, generate);
  lector::SummaryRow row{report.system, report.split, report.aggregates.groups, report.aggregates.op,
                         report.rows.size(), report.failures()};
  std::cout << lector::render_table({row});
  for (const auto& r : report.rows) {
    if (!r.ok) std::cerr << "lector: " << r.paper_id << ": " << r.error << "\n";
  }
  std::cout << "papers: " << report.rows.size() << ", failures: " << report.failures() << "\n"
            << "report: " << (pipeline.config().out_dir / "evaluation" / (split + ".summary.json")).string() << "\n";
  return kOk;
}

int cmd_report(const std::vector<std::string>& paths, const std::string& format) {
  std::vector<lector::SummaryRow> rows;
  for (const auto& path : paths) {
    auto parsed = lector::parse_summaries(read_input(path));
    rows.insert(rows.end(), parsed.begin(), parsed.end());
  }
  const lector::TableFormat fmt = format == "csv"   ? lector::TableFormat::kCsv
                                  : format == "tsv" ? lector::TableFormat::kTsv
                                                    : lector::TableFormat::kText;
  std::cout << lector::render_table(rows, fmt);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reasoning-graph extraction, introduction writing and reward evaluation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "lector 0.1.0");

  GlobalOptions g;
  app.add_option("--config", g.config_path, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_flag("--mock", g.mock, "Use the deterministic offline backends");
  app.add_option("--parallelism", g.parallelism, "Papers evaluated concurrently")->check(CLI::PositiveNumber);
  app.add_option("--cache-dir", g.cache_dir, "Persistent response cache directory");
  app.add_option("--out", g.out_dir, "Output directory");
  app.add_option("--corpus", g.corpus_dir, "Directory holding <id>.json paper records");
  app.add_option("--manifest", g.manifest, "Split manifest (defaults to <corpus>/manifest.json)");
  app.add_option("--template-dir", g.template_dir, "Directory overriding bundled templates");

  std::string graph_path;
  bool as_json = false;
  auto* validate = app.add_subcommand("validate-graph", "Check a DOT reasoning graph");
  validate->add_option("graph", graph_path, "DOT file, or - for stdin")->required();
  validate->add_flag("--json", as_json, "Print the report as JSON");

  std::vector<std::string> extract_ids;
  auto* extract = app.add_subcommand("extract", "Extract reasoning graphs for papers");
  extract->add_option("paper_ids", extract_ids, "Paper ids")->required();

  std::string write_id;
  std::string write_graph;
  auto* write = app.add_subcommand("write", "Write an introduction from a reasoning graph");
  write->add_option("paper_id", write_id, "Paper id")->required();
  write->add_option("--graph", write_graph, "Graph file (defaults to the extracted graph)");

  std::string split;
  bool generate = false;
  auto* evaluate = app.add_subcommand("evaluate", "Score every paper of a split");
  evaluate->add_option("split", split, "Split name from the manifest")->required();
  evaluate->add_flag("--generate", generate, "Run extract and write for papers without artifacts");

  std::vector<std::string> report_paths;
  std::string format = "text";
  auto* report = app.add_subcommand("report", "Render summary files as a score table");
  report->add_option("summaries", report_paths, "Summary JSON files")->required();
  report->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "csv", "tsv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*validate) return cmd_validate_graph(graph_path, as_json);
    if (*extract) return cmd_extract(g, extract_ids);
    if (*write) return cmd_write(g, write_id, write_graph);
    if (*evaluate) return cmd_evaluate(g, split, generate);
    if (*report) return cmd_report(report_paths, format);
  } catch (const lector::ConfigurationError& e) {
    std::cerr << "lector: configuration error: " << e.what() << "\n";
    return kUsage;
  } catch (const lector::GraphParseFailure& e) {
    std::cerr << "lector: " << e.what() << "\n";
    return kParseOnly;
  } catch (const lector::CapabilityUnavailable& e) {
    std::cerr << "lector: endpoint failure: " << e.what() << "\n";
    return kEndpoint;
  } catch (const lector::TransportError& e) {
    std::cerr << "lector: endpoint failure: " << e.what() << "\n";
    return kEndpoint;
  } catch (const lector::DataError& e) {
    std::cerr << "lector: data error: " << e.what() << "\n";
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "lector: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
