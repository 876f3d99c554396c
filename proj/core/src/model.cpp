#include "dpgcn/model.hpp"

#include <stdexcept>

namespace dpgcn {

std::string to_string(Ablation a) {
  switch (a) {
    case Ablation::Full: return "full";
    case Ablation::NoC: return "no_c";
    case Ablation::NoT: return "no_t";
    case Ablation::NoAttention: return "no_attention";
    case Ablation::SingleHead: return "single_head";
    case Ablation::SingleLayer: return "single_layer";
  }
  return "full";
}

Ablation ablation_from_string(const std::string& s) {
  if (s == "full") return Ablation::Full;
  if (s == "no_c") return Ablation::NoC;
  if (s == "no_t") return Ablation::NoT;
  if (s == "no_attention") return Ablation::NoAttention;
  if (s == "single_head") return Ablation::SingleHead;
  if (s == "single_layer") return Ablation::SingleLayer;
  throw std::invalid_argument("unknown ablation: " + s);
}

TensorPtr c_gcn_forward(Tape& tape, const NormalizedAdjacency& adj,
                        const TensorPtr& unified, const TensorPtr& weight_c) {
  TensorPtr transformed =
      unified ? tape.matmul(unified, weight_c) : weight_c;  // I * W = W
  return tape.relu(tape.spmm(adj.matrix, adj.matrix, transformed));
}

std::pair<TensorPtr, TensorPtr> t_gcn_forward(Tape& tape, const RoleAssignment& roles,
                                              const TensorPtr& unified,
                                              const TensorPtr& weight_t,
                                              MessageCounter* counter) {
  TensorPtr aggregated;  // A_t * H, one message per node (up)
  if (unified) {
    aggregated = tape.matmul(
        tape.spmm(roles.membership, roles.membership_t, unified, counter), weight_t);
  } else {
    aggregated = tape.spmm(roles.membership, roles.membership_t, weight_t, counter);
  }
  TensorPtr role_emb = tape.relu(aggregated);
  // share each role row back to its members, one message per node (down)
  TensorPtr member_emb = tape.spmm(roles.share, roles.share_t, role_emb, counter);
  return {role_emb, member_emb};
}

TensorPtr attention_fuse(Tape& tape, const TensorPtr& unified,
                         const std::vector<TensorPtr>& branches,
                         const std::vector<AttentionHead>& heads, double leaky_slope,
                         std::vector<std::pair<TensorPtr, TensorPtr>>* attention_out) {
  if (branches.empty()) {
    throw std::invalid_argument("attention_fuse: no branch outputs");
  }
  if (heads.empty()) {
    // attention ablated: unweighted mean of the branch outputs
    if (branches.size() == 1) return branches[0];
    return tape.scale(tape.add(branches[0], branches[1]), 0.5);
  }
  TensorPtr fused;
  for (const AttentionHead& head : heads) {
    std::vector<TensorPtr> transformed;
    transformed.reserve(branches.size());
    for (const TensorPtr& b : branches) {
      transformed.push_back(tape.matmul(b, head.value_weight));
    }
    TensorPtr mixed;
    if (branches.size() == 2) {
      TensorPtr query =
          unified ? tape.matmul(unified, head.query_weight) : head.query_weight;
      auto score = [&](const TensorPtr& v) {
        return tape.leaky_relu(
            tape.matmul(tape.concat_cols(query, v), head.attention_vec), leaky_slope);
      };
      auto [a_c, a_t] = tape.softmax_pair(score(transformed[0]), score(transformed[1]));
      if (attention_out) attention_out->emplace_back(a_c, a_t);
      mixed = tape.add(tape.row_scale(transformed[0], a_c),
                       tape.row_scale(transformed[1], a_t));
    } else {
      mixed = transformed[0];  // softmax over a single branch is exactly 1
    }
    TensorPtr head_out = tape.elu(mixed);
    fused = fused ? tape.concat_cols(fused, head_out) : head_out;
  }
  return fused;
}

TensorPtr classify(Tape& tape, const TensorPtr& unified, const TensorPtr& classifier,
                   bool normalize, TensorPtr* normalized_out) {
  TensorPtr activated = tape.elu(unified);
  TensorPtr pre = normalize ? tape.l2_normalize_rows(activated) : activated;
  if (normalized_out) *normalized_out = pre;
  return tape.log_softmax_rows(tape.matmul(pre, classifier));
}

namespace {

int heads_in_layer(const ModelConfig& cfg, int layer, int effective_layers) {
  if (cfg.ablation == Ablation::NoAttention) return 0;
  if (cfg.ablation == Ablation::SingleHead) return 1;
  return layer == effective_layers - 1 ? 1 : cfg.heads;
}

}  // namespace

DpGcnModel::DpGcnModel(const ModelConfig& config, std::mt19937_64& rng)
    : config_(config) {
  if (config.input_dim <= 0) throw std::invalid_argument("ModelConfig: input_dim must be set");
  if (config.num_classes < 2) throw std::invalid_argument("ModelConfig: need >= 2 classes");
  if (config.hidden < 1 || config.heads < 1 || config.num_layers < 1) {
    throw std::invalid_argument("ModelConfig: hidden/heads/layers must be >= 1");
  }

  const int effective_layers =
      config.ablation == Ablation::SingleLayer ? 1 : config.num_layers;
  int d_in = config.input_dim;
  for (int l = 0; l < effective_layers; ++l) {
    DpGcnLayer layer;
    layer.d_in = d_in;
    layer.d_out = config.hidden;
    const std::string prefix = "layer" + std::to_string(l) + ".";
    layer.weight_c = make_param(glorot_uniform(d_in, config.hidden, rng), prefix + "W_c");
    layer.weight_t = make_param(glorot_uniform(d_in, config.hidden, rng), prefix + "W_t");
    params_.push_back(layer.weight_c);
    params_.push_back(layer.weight_t);
    const int k = heads_in_layer(config, l, effective_layers);
    for (int h = 0; h < k; ++h) {
      AttentionHead head;
      const std::string hp = prefix + "head" + std::to_string(h) + ".";
      head.query_weight = make_param(glorot_uniform(d_in, config.hidden, rng), hp + "W_q");
      head.value_weight =
          make_param(glorot_uniform(config.hidden, config.hidden, rng), hp + "W_a");
      head.attention_vec =
          make_param(glorot_uniform(2 * config.hidden, 1, rng), hp + "alpha");
      params_.push_back(head.query_weight);
      params_.push_back(head.value_weight);
      params_.push_back(head.attention_vec);
      layer.heads.push_back(std::move(head));
    }
    d_in = k == 0 ? config.hidden : k * config.hidden;
    layers_.push_back(std::move(layer));
  }
  embedding_dim_ = d_in;
  classifier_ =
      make_param(glorot_uniform(embedding_dim_, config.num_classes, rng), "classifier");
  params_.push_back(classifier_);
}

ForwardArtifacts DpGcnModel::forward(Tape& tape, const NormalizedAdjacency& adj,
                                     const RoleAssignment& roles,
                                     const Matrix* features) const {
  const int n = static_cast<int>(adj.source_degrees.size());
  if (static_cast<int>(roles.member_of.size()) != n) {
    throw std::invalid_argument("forward: role assignment covers " +
                                std::to_string(roles.member_of.size()) +
                                " nodes, graph has " + std::to_string(n));
  }
  TensorPtr unified;
  if (features != nullptr) {
    if (features->rows() != n || features->cols() != config_.input_dim) {
      throw std::invalid_argument("forward: feature matrix shape mismatch");
    }
    unified = make_const(*features, "features");
  } else if (!config_.identity_features || config_.input_dim != n) {
    throw std::invalid_argument(
        "forward: model expects explicit features (input_dim " +
        std::to_string(config_.input_dim) + ", graph " + std::to_string(n) + ")");
  }

  const bool has_c = config_.ablation != Ablation::NoC;
  const bool has_t = config_.ablation != Ablation::NoT;

  ForwardArtifacts out;
  for (const DpGcnLayer& layer : layers_) {
    LayerArtifacts art;
    MessageCounter counter;
    std::vector<TensorPtr> branches;
    if (has_c) {
      art.conv_c = c_gcn_forward(tape, adj, unified, layer.weight_c);
      branches.push_back(art.conv_c);
    }
    if (has_t) {
      auto [role_emb, member_emb] =
          t_gcn_forward(tape, roles, unified, layer.weight_t, &counter);
      art.role_emb = role_emb;
      art.conv_t = member_emb;
      branches.push_back(member_emb);
    }
    art.unified = attention_fuse(tape, unified, branches, layer.heads,
                                 config_.leaky_slope, &art.attention);
    art.t_messages = counter.messages;
    unified = art.unified;
    out.layers.push_back(std::move(art));
  }
  out.embedding = unified;
  out.log_probs =
      classify(tape, unified, classifier_, config_.normalize_embedding, &out.normalized);
  return out;
}

}  // namespace dpgcn
