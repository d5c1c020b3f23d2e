#include <benchmark/benchmark.h>

#include <random>

#include "macgrid/clique_decoder.hpp"
#include "macgrid/synth.hpp"
#include "macgrid/trainer.hpp"

namespace {

using namespace macgrid;

UndirectedGraph random_graph(int m, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(p);
  UndirectedGraph g(m);
  for (int u = 0; u < m; ++u) {
    for (int v = u + 1; v < m; ++v) {
      if (edge(rng)) g.connect(u, v);
    }
  }
  return g;
}

void BM_Cliques(benchmark::State& state, CliqueSearch search) {
  const UndirectedGraph g = random_graph(static_cast<int>(state.range(0)), 0.5, 3);
  for (auto _ : state) benchmark::DoNotOptimize(maximal_cliques(g, search));
}
BENCHMARK_CAPTURE(BM_Cliques, pivot, CliqueSearch::kPivot)->Arg(12)->Arg(32)->Arg(64);
BENCHMARK_CAPTURE(BM_Cliques, basic, CliqueSearch::kBasic)->Arg(12)->Arg(32)->Arg(64);

const Corpus& synth_corpus() {
  static const Corpus corpus = [] {
    SynthSpec spec;
    spec.sentences = 1000;
    spec.seed = 7;
    return generate_synthetic(spec).corpus;
  }();
  return corpus;
}

void BM_DecodeGoldTables(benchmark::State& state) {
  const Corpus& c = synth_corpus();
  const TagAlphabet a = c.alphabet();
  std::vector<std::pair<SegmentTagTable, EdgeTagTable>> tables;
  for (const auto& s : c.sentences) {
    tables.emplace_back(encode_segment_table(s.sentence, s.entities, a),
                        encode_edge_table(s.sentence, s.entities, a));
  }
  for (auto _ : state) {
    for (std::size_t k = 0; k < tables.size(); ++k) {
      benchmark::DoNotOptimize(decode_sentence(c.sentences[k].sentence, tables[k].first, tables[k].second, a));
    }
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(tables.size()));
}
BENCHMARK(BM_DecodeGoldTables);

Model bench_model(int dim) {
  TrainConfig tc;
  tc.dim = dim;
  const Corpus& c = synth_corpus();
  return Model::initialize(tc.model_config(), Vocabulary::build(c), c.types, 1);
}

Sentence bench_sentence(int n) {
  const Corpus& c = synth_corpus();
  for (const auto& s : c.sentences) {
    if (s.sentence.size() >= n) {
      return Sentence{"b", std::vector<std::string>(s.sentence.tokens.begin(), s.sentence.tokens.begin() + n)};
    }
  }
  return Sentence{"b", std::vector<std::string>(n, "w0")};
}

void BM_Forward(benchmark::State& state) {
  const Model m = bench_model(static_cast<int>(state.range(0)));
  const Sentence s = bench_sentence(static_cast<int>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(forward(m, s));
}
BENCHMARK(BM_Forward)->Args({32, 10})->Args({32, 20})->Args({64, 20});

void BM_ForwardBackward(benchmark::State& state) {
  const Model m = bench_model(static_cast<int>(state.range(0)));
  const Sentence s = bench_sentence(static_cast<int>(state.range(1)));
  const GoldTargets gold = make_targets(s, {}, m.alphabet());
  for (auto _ : state) benchmark::DoNotOptimize(backward(m, forward(m, s), gold));
}
BENCHMARK(BM_ForwardBackward)->Args({32, 10})->Args({32, 20});

void BM_ThresholdAndDecode(benchmark::State& state) {
  const Model m = bench_model(32);
  const Sentence s = bench_sentence(20);
  const auto grids = predict_grids(m, s);
  const TagAlphabet a = m.alphabet();
  const Threshold theta(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_sentence(s, threshold_segment_grid(grids.first, a, theta),
                                             threshold_edge_grid(grids.second, a, theta), a));
  }
}
BENCHMARK(BM_ThresholdAndDecode);

}  // namespace

BENCHMARK_MAIN();
