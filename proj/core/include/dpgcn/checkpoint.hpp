#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "dpgcn/model.hpp"
#include "dpgcn/roles.hpp"

namespace dpgcn {

/// Versioned JSON checkpoint: model config, every parameter tensor, the role
/// assignment the model was trained with, and a dataset fingerprint used to
/// reject evaluation against a different graph.
struct Checkpoint {
  static constexpr int kVersion = 1;
  ModelConfig config;
  std::vector<Matrix> param_values;   // in DpGcnModel::parameters() order
  std::vector<std::string> param_names;
  std::vector<int> member_of;         // role per node
  int num_nodes = 0;
  std::int64_t num_edges = 0;
  std::string dataset_name;
  std::string spec_checksum;
  double train_fraction = 0.67;       // split provenance, so eval can rebuild it
  std::uint64_t train_seed = 1;
};

Checkpoint make_checkpoint(const DpGcnModel& model, const RoleAssignment& roles,
                           int num_nodes, std::int64_t num_edges,
                           const std::string& dataset_name,
                           const std::string& spec_checksum,
                           double train_fraction = 0.67, std::uint64_t train_seed = 1);

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json& j);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

/// Rebuilds the model (and roles) stored in a checkpoint. Throws
/// std::invalid_argument when the checkpoint does not match the graph size.
DpGcnModel restore_model(const Checkpoint& ckpt);
RoleAssignment restore_roles(const Checkpoint& ckpt);

nlohmann::json model_config_to_json(const ModelConfig& config);
ModelConfig model_config_from_json(const nlohmann::json& j);

}  // namespace dpgcn
