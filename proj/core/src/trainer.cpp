#include "dpgcn/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace dpgcn {

SplitMask make_split(const std::vector<int>& labels, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0) {
    throw std::invalid_argument("make_split: fraction must be in (0, 1)");
  }
  const int n = static_cast<int>(labels.size());
  int num_classes = 0;
  for (int y : labels) num_classes = std::max(num_classes, y + 1);
  if (num_classes == 0) throw std::invalid_argument("make_split: no labeled nodes");

  std::vector<std::vector<int>> by_class(static_cast<std::size_t>(num_classes));
  for (int i = 0; i < n; ++i) {
    if (labels[static_cast<std::size_t>(i)] >= 0) {
      by_class[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])].push_back(i);
    }
  }

  SplitMask out;
  out.mask.assign(static_cast<std::size_t>(n), NodeMask::Unlabeled);
  std::mt19937_64 rng(seed);
  for (auto& ids : by_class) {
    if (ids.empty()) continue;
    std::shuffle(ids.begin(), ids.end(), rng);
    const auto count = static_cast<std::int64_t>(ids.size());
    std::int64_t take = std::lround(fraction * static_cast<double>(count));
    take = std::max<std::int64_t>(1, take);
    if (count >= 2) take = std::min(take, count - 1);  // keep at least one test node
    for (std::int64_t i = 0; i < count; ++i) {
      const int node = ids[static_cast<std::size_t>(i)];
      if (i < take) {
        out.mask[static_cast<std::size_t>(node)] = NodeMask::Train;
        out.train_ids.push_back(node);
      } else {
        out.mask[static_cast<std::size_t>(node)] = NodeMask::Test;
        out.test_ids.push_back(node);
      }
    }
  }
  std::sort(out.train_ids.begin(), out.train_ids.end());
  std::sort(out.test_ids.begin(), out.test_ids.end());
  return out;
}

std::vector<double> resample_train_mask(const SplitMask& split,
                                        const std::vector<int>& labels,
                                        double oversample, double undersample) {
  if (oversample < 0.0 || undersample < 0.0) {
    throw std::invalid_argument("resample_train_mask: ratios must be >= 0");
  }
  const std::size_t n = labels.size();
  std::vector<std::int64_t> counts;
  for (int i : split.train_ids) {
    const int y = labels[static_cast<std::size_t>(i)];
    if (y >= static_cast<int>(counts.size())) counts.resize(static_cast<std::size_t>(y) + 1, 0);
    ++counts[static_cast<std::size_t>(y)];
  }
  const std::int64_t max_count =
      counts.empty() ? 0 : *std::max_element(counts.begin(), counts.end());

  std::vector<double> weights(n, 0.0);
  for (int i : split.train_ids) {
    const int y = labels[static_cast<std::size_t>(i)];
    const bool majority = counts[static_cast<std::size_t>(y)] == max_count;
    weights[static_cast<std::size_t>(i)] = majority ? undersample : oversample;
  }
  return weights;
}

std::vector<int> predict(const Matrix& log_probs) {
  std::vector<int> out(static_cast<std::size_t>(log_probs.rows()));
  for (Eigen::Index i = 0; i < log_probs.rows(); ++i) {
    Eigen::Index arg = 0;
    log_probs.row(i).maxCoeff(&arg);
    out[static_cast<std::size_t>(i)] = static_cast<int>(arg);
  }
  return out;
}

TrainResult train(const Graph& graph, const NormalizedAdjacency& adj,
                  const RoleAssignment& roles, const Matrix* features,
                  DpGcnModel& model, const SplitMask& split, const TrainConfig& config) {
  if (split.train_ids.empty()) throw std::invalid_argument("train: empty train mask");
  const std::vector<int>& labels = graph.labels();
  const int num_classes = model.config().num_classes;

  const std::vector<double> weights =
      resample_train_mask(split, labels, config.oversample, config.undersample);

  AdamConfig adam_cfg;
  adam_cfg.lr = config.lr;
  adam_cfg.weight_decay = config.weight_decay;
  Adam optimizer(model.parameters(), adam_cfg);

  TrainResult result;
  double best_loss = std::numeric_limits<double>::infinity();
  std::vector<Matrix> best_params;
  int since_best = 0;

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    Tape tape;
    ForwardArtifacts art;
    TensorPtr loss;
    try {
      art = model.forward(tape, adj, roles, features);
      loss = tape.nll_loss(art.log_probs, labels, weights);
    } catch (const NonFiniteError& e) {
      throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                             ": " + e.what());
    }
    const double loss_value = loss->value(0, 0);
    if (!std::isfinite(loss_value)) {
      throw TrainingDiverged("training diverged at epoch " + std::to_string(epoch) +
                             ": loss is not finite");
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss_value;
    if (!split.test_ids.empty()) {
      const std::vector<int> preds = predict(art.log_probs->value);
      const EvalReport report = evaluate(preds, labels, split.test_ids, num_classes);
      rec.test_acc = report.accuracy;
      rec.test_macro_f1 = report.macro_f1;
    }
    result.history.push_back(rec);

    if (loss_value < best_loss) {
      best_loss = loss_value;
      result.best_epoch = epoch;
      best_params.clear();
      for (const TensorPtr& p : model.parameters()) best_params.push_back(p->value);
      since_best = 0;
    } else if (++since_best >= config.patience) {
      result.stopped_early = true;
      break;
    }

    tape.backward(loss);
    optimizer.step();
  }

  if (!best_params.empty()) {
    const auto& params = model.parameters();
    for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best_params[i];
  }
  result.best_loss = best_loss;
  return result;
}

}  // namespace dpgcn
