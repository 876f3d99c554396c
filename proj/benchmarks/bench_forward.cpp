#include <benchmark/benchmark.h>

#include <random>

#include "dpgcn/experiments.hpp"
#include "dpgcn/model.hpp"

namespace {

struct ForwardFixture {
  dpgcn::DatasetBundle bundle;
  dpgcn::NormalizedAdjacency adj;
  dpgcn::RoleAssignment roles;
  dpgcn::ModelConfig cfg;

  explicit ForwardFixture(int n)
      : bundle(dpgcn::generate_imbalanced_seller_graph(n, 0.02, 7)),
        adj(dpgcn::normalize_adjacency(bundle.graph)),
        roles(dpgcn::compute_roles(bundle.graph, dpgcn::RoleSpec{100, 2, 12, 1, 1})) {
    cfg.num_layers = 2;
    cfg.hidden = 32;
    cfg.heads = 2;
    cfg.num_classes = 2;
    cfg.input_dim = n;
  }
};

void BM_full_forward(benchmark::State& state) {
  const ForwardFixture fx(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(3);
  dpgcn::DpGcnModel model(fx.cfg, rng);
  for (auto _ : state) {
    dpgcn::Tape tape;
    auto art = model.forward(tape, fx.adj, fx.roles, nullptr);
    benchmark::DoNotOptimize(art.log_probs->value.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_full_forward)->RangeMultiplier(4)->Range(625, 10000)->Unit(benchmark::kMillisecond);

void BM_forward_backward_step(benchmark::State& state) {
  const ForwardFixture fx(static_cast<int>(state.range(0)));
  std::mt19937_64 rng(3);
  dpgcn::DpGcnModel model(fx.cfg, rng);
  const auto& labels = fx.bundle.graph.labels();
  std::vector<double> weights(labels.size(), 1.0);
  for (auto _ : state) {
    dpgcn::Tape tape;
    auto art = model.forward(tape, fx.adj, fx.roles, nullptr);
    auto loss = tape.nll_loss(art.log_probs, labels, weights);
    tape.backward(loss);
    for (const auto& p : model.parameters()) p->zero_grad();
    benchmark::DoNotOptimize(loss->value.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_forward_backward_step)->RangeMultiplier(4)->Range(625, 10000)->Unit(benchmark::kMillisecond);

}  // namespace
