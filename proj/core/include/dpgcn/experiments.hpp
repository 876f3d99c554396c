#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpgcn/checkpoint.hpp"
#include "dpgcn/datasets.hpp"
#include "dpgcn/trainer.hpp"

namespace dpgcn {

/// Deterministic sub-seed derivation (splitmix64 of base ^ tag).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag);

struct DatasetSpec {
  std::string kind = "files";  // files | mirrored-karate | planted-roles |
                               // clique-pair | sellers | community
  std::string name;
  std::string edge_path;
  std::string label_path;
  // generator parameters (used per kind)
  int num_communities = 12;
  int community_size = 8;
  std::vector<std::string> motifs = {"star", "ring", "clique"};
  int clique_size = 5;
  int n = 10000;
  double risky_fraction = 0.02;
  double p_in = 0.3;
  double p_out = 0.01;
  std::uint64_t seed = 7;
};

struct RoleSpec {
  int k = 100;
  int hops = 2;
  int bins = 12;
  std::uint64_t seed = 1;
  int restarts = 4;
};

struct ModelSpec {
  int layers = 2;
  int hidden = 120;
  int heads = 4;
  bool normalize = true;
  std::string ablation = "full";
};

/// Everything needed to re-run an experiment to identical results.
struct ExperimentSpec {
  DatasetSpec dataset;
  RoleSpec roles;
  ModelSpec model;
  TrainConfig train;
  std::string out_dir = "runs/out";
};

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const nlohmann::json& j);
/// FNV-1a checksum of the canonical serialized spec; stamped on all outputs.
std::string experiment_spec_checksum(const ExperimentSpec& spec);

DatasetBundle resolve_dataset(const DatasetSpec& spec);

/// Struct-feature extraction + seeded k-means per the role spec.
RoleAssignment compute_roles(const Graph& graph, const RoleSpec& spec);

ModelConfig make_model_config(const ExperimentSpec& spec, int num_nodes, int num_classes);

struct TrainedRun {
  DatasetBundle bundle;
  RoleAssignment roles;
  DpGcnModel model;
  SplitMask split;
  TrainResult result;
  EvalReport test_report;
  EvalReport all_report;
  Matrix embedding;  // final unified H under the best parameters
};

TrainedRun run_training(const ExperimentSpec& spec);

/// Forward a restored checkpoint over a dataset; returns final embedding and
/// log-probabilities. Throws std::invalid_argument on a size mismatch.
struct InferenceOutput {
  Matrix embedding;
  Matrix log_probs;
  std::vector<int> predictions;
};
InferenceOutput run_inference(const Checkpoint& ckpt, const DatasetBundle& bundle);

struct MirrorPairRow {
  int node = 0;
  int mirror = 0;
  double distance_full = 0.0;
  double distance_tpath = 0.0;
  int nn_rank_full = 0;  // 1 = the mirror is the nearest neighbor
  bool mutual_full = false;
  bool mutual_gcn = false;
};

struct MirrorReport {
  int trials = 0;
  std::uint64_t seed = 0;
  double tpath_max_pair_distance = 0.0;  // max over all trials and pairs
  double full_mutual_rate_mean = 0.0;
  double gcn_mutual_rate_mean = 0.0;
  std::vector<double> full_rates;  // per trial
  std::vector<double> gcn_rates;
  Matrix embedding_full;   // first trial, 68 x dim
  Matrix embedding_gcn;
  Matrix embedding_tpath;
  std::vector<int> cluster_ids;       // argmax of log-softmax over the dim axis
  std::vector<MirrorPairRow> pairs;   // first trial detail
};

/// The untrained mirrored-karate experiment: random weights, mirror-paired
/// roles, `dim`-dimensional representations; repeated over `trials` seeds.
MirrorReport run_mirror_karate(int trials, std::uint64_t seed, int dim = 10);

struct AblationRow {
  std::string variant;
  std::uint64_t seed = 0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
};

/// Runs {full, no_c, no_t, no_attention, single_head, single_layer} with
/// paired seeds; returns one row per variant per seed.
std::vector<AblationRow> run_ablation(const ExperimentSpec& spec, int num_seeds);

std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace dpgcn
