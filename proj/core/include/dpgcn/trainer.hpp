#pragma once

#include <cstdint>
#include <vector>

#include "dpgcn/metrics.hpp"
#include "dpgcn/model.hpp"
#include "dpgcn/optimizer.hpp"

namespace dpgcn {

struct TrainConfig {
  double train_fraction = 0.67;
  int epochs = 300;
  double lr = 0.01;
  double weight_decay = 5e-4;
  std::uint64_t seed = 1;
  int patience = 50;        // epochs without train-loss improvement before stopping
  double oversample = 1.0;  // loss-weight multiplier for minority classes
  double undersample = 1.0; // loss-weight multiplier for the majority class(es)
};

struct SplitMask {
  std::vector<NodeMask> mask;  // per node
  std::vector<int> train_ids;
  std::vector<int> test_ids;
};

/// Stratified train/test split. Per class: round(fraction * count) train nodes
/// (at least 1, at most count-1 when count >= 2); classes with a single node
/// put it in train. Deterministic per seed. Nodes with label -1 stay unlabeled.
SplitMask make_split(const std::vector<int>& labels, double fraction, std::uint64_t seed);

/// Per-node loss weights realizing over/under-sampling without duplicating
/// nodes: majority class(es) get `undersample`, every other class `oversample`.
/// Weighting the NLL is exactly equivalent to duplicating nodes in the loss.
std::vector<double> resample_train_mask(const SplitMask& split,
                                        const std::vector<int>& labels,
                                        double oversample, double undersample);

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double test_acc = 0.0;
  double test_macro_f1 = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = -1;       // epoch with the lowest train loss
  double best_loss = 0.0;
  bool stopped_early = false;
};

struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full-graph training: one forward per epoch, weighted NLL over train nodes,
/// Adam step, per-epoch test metrics. The model is left holding the
/// best-by-train-loss parameters. Deterministic per seed and config.
/// Throws TrainingDiverged when the loss goes non-finite.
TrainResult train(const Graph& graph, const NormalizedAdjacency& adj,
                  const RoleAssignment& roles, const Matrix* features,
                  DpGcnModel& model, const SplitMask& split, const TrainConfig& config);

/// Argmax class per row of log-probabilities.
std::vector<int> predict(const Matrix& log_probs);

}  // namespace dpgcn
