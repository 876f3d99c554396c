#include "dpgcn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "dpgcn/io.hpp"

namespace dpgcn {

nlohmann::json model_config_to_json(const ModelConfig& c) {
  return nlohmann::json{
      {"num_layers", c.num_layers},
      {"hidden", c.hidden},
      {"heads", c.heads},
      {"num_classes", c.num_classes},
      {"input_dim", c.input_dim},
      {"identity_features", c.identity_features},
      {"normalize_embedding", c.normalize_embedding},
      {"ablation", to_string(c.ablation)},
      {"leaky_slope", c.leaky_slope},
  };
}

ModelConfig model_config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.num_layers = j.value("num_layers", c.num_layers);
  c.hidden = j.value("hidden", c.hidden);
  c.heads = j.value("heads", c.heads);
  c.num_classes = j.value("num_classes", c.num_classes);
  c.input_dim = j.value("input_dim", c.input_dim);
  c.identity_features = j.value("identity_features", c.identity_features);
  c.normalize_embedding = j.value("normalize_embedding", c.normalize_embedding);
  c.ablation = ablation_from_string(j.value("ablation", std::string("full")));
  c.leaky_slope = j.value("leaky_slope", c.leaky_slope);
  return c;
}

Checkpoint make_checkpoint(const DpGcnModel& model, const RoleAssignment& roles,
                           int num_nodes, std::int64_t num_edges,
                           const std::string& dataset_name,
                           const std::string& spec_checksum,
                           double train_fraction, std::uint64_t train_seed) {
  Checkpoint ckpt;
  ckpt.config = model.config();
  for (const TensorPtr& p : model.parameters()) {
    ckpt.param_values.push_back(p->value);
    ckpt.param_names.push_back(p->name);
  }
  ckpt.member_of = roles.member_of;
  ckpt.num_nodes = num_nodes;
  ckpt.num_edges = num_edges;
  ckpt.dataset_name = dataset_name;
  ckpt.spec_checksum = spec_checksum;
  ckpt.train_fraction = train_fraction;
  ckpt.train_seed = train_seed;
  return ckpt;
}

nlohmann::json checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::json params = nlohmann::json::array();
  for (std::size_t i = 0; i < ckpt.param_values.size(); ++i) {
    const Matrix& m = ckpt.param_values[i];
    std::vector<double> data(m.data(), m.data() + m.size());
    params.push_back({{"name", ckpt.param_names[i]},
                      {"rows", m.rows()},
                      {"cols", m.cols()},
                      {"data", data}});
  }
  return nlohmann::json{
      {"format", "dpgcn-checkpoint"},
      {"version", Checkpoint::kVersion},
      {"model", model_config_to_json(ckpt.config)},
      {"params", params},
      {"roles", ckpt.member_of},
      {"dataset", {{"name", ckpt.dataset_name},
                   {"num_nodes", ckpt.num_nodes},
                   {"num_edges", ckpt.num_edges}}},
      {"split", {{"fraction", ckpt.train_fraction}, {"seed", ckpt.train_seed}}},
      {"spec_checksum", ckpt.spec_checksum},
  };
}

Checkpoint checkpoint_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "dpgcn-checkpoint") {
    throw std::runtime_error("checkpoint: not a dpgcn checkpoint file");
  }
  if (j.value("version", 0) != Checkpoint::kVersion) {
    throw std::runtime_error("checkpoint: unsupported version " +
                             std::to_string(j.value("version", 0)));
  }
  Checkpoint ckpt;
  ckpt.config = model_config_from_json(j.at("model"));
  for (const auto& p : j.at("params")) {
    const auto rows = p.at("rows").get<Eigen::Index>();
    const auto cols = p.at("cols").get<Eigen::Index>();
    const auto data = p.at("data").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(data.size()) != rows * cols) {
      throw std::runtime_error("checkpoint: tensor size mismatch for " +
                               p.value("name", std::string("?")));
    }
    Matrix m(rows, cols);
    std::copy(data.begin(), data.end(), m.data());
    ckpt.param_values.push_back(std::move(m));
    ckpt.param_names.push_back(p.value("name", std::string()));
  }
  ckpt.member_of = j.at("roles").get<std::vector<int>>();
  ckpt.num_nodes = j.at("dataset").at("num_nodes").get<int>();
  ckpt.num_edges = j.at("dataset").at("num_edges").get<std::int64_t>();
  ckpt.dataset_name = j.at("dataset").value("name", std::string());
  if (j.contains("split")) {
    ckpt.train_fraction = j.at("split").value("fraction", ckpt.train_fraction);
    ckpt.train_seed = j.at("split").value("seed", ckpt.train_seed);
  }
  ckpt.spec_checksum = j.value("spec_checksum", std::string());
  return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  atomic_write(path, checkpoint_to_json(ckpt).dump() + "\n");
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return checkpoint_from_json(j);
}

DpGcnModel restore_model(const Checkpoint& ckpt) {
  std::mt19937_64 rng(0);  // values are overwritten below
  DpGcnModel model(ckpt.config, rng);
  const auto& params = model.parameters();
  if (params.size() != ckpt.param_values.size()) {
    throw std::runtime_error("checkpoint: parameter count mismatch");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i]->rows() != ckpt.param_values[i].rows() ||
        params[i]->cols() != ckpt.param_values[i].cols()) {
      throw std::runtime_error("checkpoint: shape mismatch for parameter " +
                               params[i]->name);
    }
    params[i]->value = ckpt.param_values[i];
  }
  return model;
}

RoleAssignment restore_roles(const Checkpoint& ckpt) {
  return build_membership(ckpt.member_of);
}

}  // namespace dpgcn
