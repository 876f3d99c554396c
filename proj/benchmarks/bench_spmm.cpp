#include <benchmark/benchmark.h>

#include <random>

#include "dpgcn/graph.hpp"

namespace {

dpgcn::Graph make_graph(int n, double avg_degree, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  std::vector<std::pair<int, int>> edges;
  const auto target = static_cast<std::int64_t>(n * avg_degree / 2.0);
  for (std::int64_t e = 0; e < target; ++e) edges.emplace_back(pick(rng), pick(rng));
  return dpgcn::build_graph(edges, n);
}

void BM_spmm(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dpgcn::Graph g = make_graph(n, 8.0, 42);
  const dpgcn::NormalizedAdjacency adj = dpgcn::normalize_adjacency(g);
  dpgcn::Matrix x = dpgcn::Matrix::Random(n, 64);
  for (auto _ : state) {
    dpgcn::Matrix y = dpgcn::spmm(adj, x);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * adj.matrix.nnz());
}
BENCHMARK(BM_spmm)->RangeMultiplier(4)->Range(256, 16384);

void BM_normalize_adjacency(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dpgcn::Graph g = make_graph(n, 8.0, 42);
  for (auto _ : state) {
    dpgcn::NormalizedAdjacency adj = dpgcn::normalize_adjacency(g);
    benchmark::DoNotOptimize(adj.matrix.values.data());
  }
}
BENCHMARK(BM_normalize_adjacency)->RangeMultiplier(4)->Range(256, 16384);

}  // namespace
