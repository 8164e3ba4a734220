#include <benchmark/benchmark.h>

#include <random>

#include "lector/corpus.hpp"
#include "lector/reasoning_graph.hpp"
#include "lector/text_metrics.hpp"

namespace {

using namespace lector;

const std::filesystem::path kFixtures = LECTOR_FIXTURE_DIR;

void BM_CheckDot(benchmark::State& state) {
  const char* name = state.range(0) ? "valid_49_nodes.dot" : "valid_multihop_tree.dot";
  const std::string text = read_file(kFixtures / "graphs" / name);
  for (auto _ : state) benchmark::DoNotOptimize(check_dot(text));
}
BENCHMARK(BM_CheckDot)->Arg(0)->Arg(1);

void BM_Bleu(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> word(0, 50);
  TokenSeq c(static_cast<std::size_t>(state.range(0)));
  TokenSeq r(static_cast<std::size_t>(state.range(0)));
  for (auto& t : c) t = "w" + std::to_string(word(rng));
  for (auto& t : r) t = "w" + std::to_string(word(rng));
  for (auto _ : state) benchmark::DoNotOptimize(bleu(c, r));
}
BENCHMARK(BM_Bleu)->Arg(20)->Arg(400);

void BM_Keyphrases(benchmark::State& state) {
  const PaperRecord paper = load_paper(kFixtures / "corpus" / "hyperbolic-topology.json");
  const std::string body = paper.body();
  for (auto _ : state) benchmark::DoNotOptimize(extract_keyphrases(body, kDefaultKeyphraseCount));
}
BENCHMARK(BM_Keyphrases);

}  // namespace

BENCHMARK_MAIN();
