#pragma once

#include <random>
#include <string>
#include <vector>

#include "dpgcn/autograd.hpp"
#include "dpgcn/graph.hpp"
#include "dpgcn/roles.hpp"

namespace dpgcn {

enum class Ablation {
  Full,
  NoC,          // topology path only
  NoT,          // connectivity path only (plain GCN stack)
  NoAttention,  // unweighted mean of the two branch outputs
  SingleHead,   // one attention head in every layer
  SingleLayer,  // one dual-path convolution layer
};

std::string to_string(Ablation a);
Ablation ablation_from_string(const std::string& s);

struct ModelConfig {
  int num_layers = 2;
  int hidden = 120;  // conv output width; also the per-head attention dim
  int heads = 4;     // non-final layers; the final layer always uses one head
  int num_classes = 2;
  int input_dim = 0;  // feature width; equals num_nodes for identity features
  bool identity_features = true;
  bool normalize_embedding = true;
  Ablation ablation = Ablation::Full;
  double leaky_slope = 0.2;
};

/// One attention head. `value_weight` is the shared transform applied to the
/// branch outputs both inside the score and in the weighted combination;
/// `query_weight` lifts the incoming unified embedding (whose width differs
/// from the branch width) into the same attention space. `attention_vec` is
/// the length-2*d_a vector applied to the concatenated pair.
struct AttentionHead {
  TensorPtr query_weight;   // d_in x d_a
  TensorPtr value_weight;   // d_out x d_a
  TensorPtr attention_vec;  // 2*d_a x 1
};

struct DpGcnLayer {
  int d_in = 0;
  int d_out = 0;
  TensorPtr weight_c;  // d_in x d_out
  TensorPtr weight_t;  // d_in x d_out
  std::vector<AttentionHead> heads;  // empty iff attention is ablated
};

struct LayerArtifacts {
  TensorPtr conv_c;     // F_c, null when the C path is ablated
  TensorPtr role_emb;   // R (num_roles x d_out), null when T is ablated
  TensorPtr conv_t;     // F_t
  TensorPtr unified;    // H^{l+1}
  // per head (a_c, a_t); empty when attention is ablated or single-branch
  std::vector<std::pair<TensorPtr, TensorPtr>> attention;
  std::int64_t t_messages = 0;  // forward messages moved by the T path
};

struct ForwardArtifacts {
  std::vector<LayerArtifacts> layers;
  TensorPtr embedding;   // final unified H
  TensorPtr normalized;  // pre-classifier rows (unit L2 when normalization is on)
  TensorPtr log_probs;   // n x num_classes
};

/// Layer building blocks. `unified` may be null, meaning the layer input is
/// the (implicit) identity feature matrix: I * W = W, so weights are used
/// directly and the n x n identity is never materialized.

/// Connectivity convolution: relu(A_hat * H * W_c).
TensorPtr c_gcn_forward(Tape& tape, const NormalizedAdjacency& adj,
                        const TensorPtr& unified, const TensorPtr& weight_c);

/// Role convolution. Stage 1 mean-aggregates member embeddings into each role
/// (relu(A_t * H * W_t)); stage 2 copies each role row to all its members.
/// Exactly 2n forward messages per call, independent of edge count.
/// Returns (role_embeddings, member_embeddings).
std::pair<TensorPtr, TensorPtr> t_gcn_forward(Tape& tape, const RoleAssignment& roles,
                                              const TensorPtr& unified,
                                              const TensorPtr& weight_t,
                                              MessageCounter* counter = nullptr);

/// Multi-head fusion of branch outputs (ordered as {c, t} when both present).
/// Per head: scores e_j = LeakyReLU([W_q h || W_a f_j] alpha), pairwise
/// softmax, then elu(sum_j a_j * W_a f_j); heads are concatenated. With a
/// single branch the weight is exactly 1. With `heads` empty the branches are
/// combined as an unweighted mean (attention ablation).
TensorPtr attention_fuse(Tape& tape, const TensorPtr& unified,
                         const std::vector<TensorPtr>& branches,
                         const std::vector<AttentionHead>& heads, double leaky_slope,
                         std::vector<std::pair<TensorPtr, TensorPtr>>* attention_out = nullptr);

/// Classifier head: elu -> optional row L2-normalization -> linear -> log-softmax.
TensorPtr classify(Tape& tape, const TensorPtr& unified, const TensorPtr& classifier,
                   bool normalize, TensorPtr* normalized_out = nullptr);

class DpGcnModel {
 public:
  DpGcnModel(const ModelConfig& config, std::mt19937_64& rng);

  const ModelConfig& config() const { return config_; }
  const std::vector<DpGcnLayer>& layers() const { return layers_; }
  const TensorPtr& classifier() const { return classifier_; }
  /// All trainable tensors in a stable order (layer by layer, classifier last).
  const std::vector<TensorPtr>& parameters() const { return params_; }
  int embedding_dim() const { return embedding_dim_; }

  /// Full dual-path forward over the whole graph. `features` may be null for
  /// identity features (requires config.identity_features).
  ForwardArtifacts forward(Tape& tape, const NormalizedAdjacency& adj,
                           const RoleAssignment& roles,
                           const Matrix* features = nullptr) const;

 private:
  ModelConfig config_;
  std::vector<DpGcnLayer> layers_;
  TensorPtr classifier_;
  std::vector<TensorPtr> params_;
  int embedding_dim_ = 0;
};

}  // namespace dpgcn
