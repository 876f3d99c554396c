#include <benchmark/benchmark.h>

#include "dpgcn/datasets.hpp"
#include "dpgcn/kmeans.hpp"
#include "dpgcn/struct_features.hpp"

namespace {

void BM_struct_features(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dpgcn::DatasetBundle bundle =
      dpgcn::generate_imbalanced_seller_graph(n, 0.02, 7);
  for (auto _ : state) {
    dpgcn::StructFeatures f = dpgcn::extract_struct_features(bundle.graph);
    benchmark::DoNotOptimize(f.matrix.data());
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_struct_features)->RangeMultiplier(4)->Range(625, 10000);

void BM_kmeans_roles(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const dpgcn::DatasetBundle bundle =
      dpgcn::generate_imbalanced_seller_graph(n, 0.02, 7);
  const dpgcn::StructFeatures f = dpgcn::extract_struct_features(bundle.graph);
  dpgcn::KMeansConfig cfg;
  cfg.k = 100;
  cfg.seed = 1;
  cfg.restarts = 1;
  for (auto _ : state) {
    dpgcn::KMeansResult r = dpgcn::kmeans(f.matrix, cfg);
    benchmark::DoNotOptimize(r.assignment.data());
  }
}
BENCHMARK(BM_kmeans_roles)->RangeMultiplier(4)->Range(625, 10000)->Unit(benchmark::kMillisecond);

}  // namespace
