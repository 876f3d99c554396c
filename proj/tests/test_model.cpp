#include <doctest.h>

#include <cmath>
#include <random>

#include "dpgcn/checkpoint.hpp"
#include "dpgcn/datasets.hpp"
#include "dpgcn/model.hpp"
#include "dpgcn/struct_features.hpp"
#include "support/test_util.hpp"

using namespace dpgcn;
using testutil::max_grad_rel_error;
using testutil::random_matrix;

namespace {

RoleAssignment random_roles(int n, int k, std::mt19937_64& rng) {
  std::vector<int> member_of(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) member_of[static_cast<std::size_t>(i)] = i < k ? i : static_cast<int>(rng() % k);
  return build_membership(member_of);
}

}  // namespace

TEST_CASE("c_gcn_forward: identity adjacency and weights propagate H") {
  std::mt19937_64 rng(1);
  const Graph g = build_graph({}, 4);  // isolated nodes -> A_hat = I
  const NormalizedAdjacency adj = normalize_adjacency(g);
  Tape tape;
  auto h = make_const(random_matrix(4, 4, rng, 0.0, 1.0));  // nonnegative
  auto w = make_const(Matrix::Identity(4, 4));
  auto out = c_gcn_forward(tape, adj, h, w);
  CHECK((out->value - h->value).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("c_gcn_forward: K3 with identity H and W averages rows to 1/3") {
  const Graph k3 = build_graph({{0, 1}, {1, 2}, {0, 2}}, 3);
  const NormalizedAdjacency adj = normalize_adjacency(k3);
  Tape tape;
  auto h = make_const(Matrix::Identity(3, 3));
  auto w = make_const(Matrix::Identity(3, 3));
  auto out = c_gcn_forward(tape, adj, h, w);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(out->value(i, j) == 1.0 / 3.0);
  }
}

TEST_CASE("t_gcn_forward: singleton roles with identity weights reproduce H") {
  std::mt19937_64 rng(2);
  const RoleAssignment roles = build_membership({0, 1, 2});
  Tape tape;
  auto h = make_const(random_matrix(3, 3, rng, 0.0, 1.0));
  auto w = make_const(Matrix::Identity(3, 3));
  auto [role_emb, member_emb] = t_gcn_forward(tape, roles, h, w);
  CHECK((member_emb->value - h->value).cwiseAbs().maxCoeff() == 0.0);
  CHECK((role_emb->value - h->value).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("t_gcn_forward: mean then share") {
  const RoleAssignment roles = build_membership({0, 0});
  Tape tape;
  Matrix h(2, 1);
  h << 2.0, 4.0;
  auto w = make_const(Matrix::Identity(1, 1));
  auto [role_emb, member_emb] = t_gcn_forward(tape, roles, make_const(h), w);
  CHECK(role_emb->value(0, 0) == 3.0);
  CHECK(member_emb->value(0, 0) == 3.0);
  CHECK(member_emb->value(1, 0) == 3.0);
}

TEST_CASE("t_gcn_forward: exactly 2n messages per call for any graph") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 10 + static_cast<int>(rng() % 30);
    const RoleAssignment roles = random_roles(n, 4, rng);
    MessageCounter counter;
    Tape tape;
    auto h = make_const(random_matrix(n, 5, rng));
    auto w = make_const(random_matrix(5, 3, rng));
    t_gcn_forward(tape, roles, h, w, &counter);
    CHECK(counter.messages == 2 * n);
  }
}

TEST_CASE("attention_fuse: identical branches give the single-branch result") {
  std::mt19937_64 rng(4);
  const int n = 6;
  const int d = 4;
  auto branch = make_const(random_matrix(n, d, rng));
  auto h_prev = make_const(random_matrix(n, 3, rng));
  std::vector<AttentionHead> heads;
  for (int k = 0; k < 2; ++k) {
    heads.push_back(AttentionHead{make_param(random_matrix(3, d, rng)),
                                  make_param(random_matrix(d, d, rng)),
                                  make_param(random_matrix(2 * d, 1, rng))});
  }
  Tape tape;
  std::vector<std::pair<TensorPtr, TensorPtr>> att;
  auto fused = attention_fuse(tape, h_prev, {branch, branch}, heads, 0.2, &att);
  Tape tape2;
  auto single = attention_fuse(tape2, h_prev, {branch}, heads, 0.2);
  CHECK((fused->value - single->value).cwiseAbs().maxCoeff() < 1e-14);
  for (const auto& [a_c, a_t] : att) {
    for (Eigen::Index i = 0; i < n; ++i) {
      CHECK(a_c->value(i, 0) == 0.5);  // equal scores -> exactly half
      CHECK(a_t->value(i, 0) == 0.5);
    }
  }
}

TEST_CASE("attention_fuse: weights sum to one per node and head") {
  std::mt19937_64 rng(5);
  const int n = 8;
  const int d = 3;
  auto f_c = make_const(random_matrix(n, d, rng));
  auto f_t = make_const(random_matrix(n, d, rng));
  auto h_prev = make_const(random_matrix(n, 5, rng));
  std::vector<AttentionHead> heads;
  for (int k = 0; k < 3; ++k) {
    heads.push_back(AttentionHead{make_param(random_matrix(5, d, rng)),
                                  make_param(random_matrix(d, d, rng)),
                                  make_param(random_matrix(2 * d, 1, rng))});
  }
  Tape tape;
  std::vector<std::pair<TensorPtr, TensorPtr>> att;
  auto fused = attention_fuse(tape, h_prev, {f_c, f_t}, heads, 0.2, &att);
  CHECK(fused->cols() == 3 * d);  // K heads concatenated
  CHECK(att.size() == 3);
  for (const auto& [a_c, a_t] : att) {
    for (Eigen::Index i = 0; i < n; ++i) {
      CHECK(std::abs(a_c->value(i, 0) + a_t->value(i, 0) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("attention_fuse: gradient wrt attention vector matches finite differences") {
  std::mt19937_64 rng(6);
  const int n = 5;
  const int d = 3;
  auto f_c = make_const(random_matrix(n, d, rng));
  auto f_t = make_const(random_matrix(n, d, rng));
  auto h_prev = make_const(random_matrix(n, 4, rng));
  std::vector<AttentionHead> heads = {
      AttentionHead{make_param(random_matrix(4, d, rng)),
                    make_param(random_matrix(d, d, rng)),
                    make_param(random_matrix(2 * d, 1, rng))}};
  std::mt19937_64 proj_rng(60);
  auto proj = make_const(random_matrix(d, 1, proj_rng));
  auto run = [&](bool backward) {
    Tape tape;
    auto fused = attention_fuse(tape, h_prev, {f_c, f_t}, heads, 0.2);
    auto loss = tape.sum(tape.matmul(fused, proj));
    if (backward) tape.backward(loss);
    return loss->value(0, 0);
  };
  run(true);
  const std::vector<TensorPtr> params = {heads[0].attention_vec, heads[0].query_weight,
                                         heads[0].value_weight};
  CHECK(max_grad_rel_error(params, [&] { return run(false); }) < 1e-5);
}

TEST_CASE("classify: unit pre-classifier rows, normalized probabilities, scale-invariant argmax") {
  std::mt19937_64 rng(7);
  const int n = 10;
  const int d = 6;
  auto classifier = make_param(random_matrix(d, 3, rng));
  const Matrix h_raw = random_matrix(n, d, rng);

  Tape tape;
  TensorPtr normalized;
  auto lp = classify(tape, make_const(h_raw), classifier, true, &normalized);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double norm = normalized->value.row(i).norm();
    CHECK(std::abs(norm - 1.0) < 1e-12);
    CHECK(std::abs(lp->value.row(i).array().exp().sum() - 1.0) < 1e-12);
  }

  // the normalization layer cancels any uniform positive scaling of its input
  Tape tape2;
  const Matrix scaled_rows =
      tape2.l2_normalize_rows(make_const(Matrix(3.7 * h_raw)))->value;
  const Matrix plain_rows = tape2.l2_normalize_rows(make_const(h_raw))->value;
  CHECK((scaled_rows - plain_rows).cwiseAbs().maxCoeff() < 1e-12);

  // on nonnegative embeddings (where elu is the identity) the whole classifier
  // head is scale-invariant: argmax unchanged under uniform positive scaling
  const Matrix h_pos = random_matrix(n, d, rng, 0.0, 2.0);
  Tape tape3;
  auto lp_pos = classify(tape3, make_const(h_pos), classifier, true, nullptr);
  auto lp_pos_scaled =
      classify(tape3, make_const(Matrix(3.7 * h_pos)), classifier, true, nullptr);
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index a = 0;
    Eigen::Index b = 0;
    lp_pos->value.row(i).maxCoeff(&a);
    lp_pos_scaled->value.row(i).maxCoeff(&b);
    CHECK(a == b);
  }
}

TEST_CASE("full model: attention weights sum to 1 and F_t rows are shared exactly") {
  std::mt19937_64 rng(8);
  const Graph g = testutil::random_graph(12, 0.3, rng);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const RoleAssignment roles = random_roles(12, 3, rng);

  ModelConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden = 5;
  cfg.heads = 2;
  cfg.num_classes = 3;
  cfg.input_dim = 12;
  std::mt19937_64 init(9);
  DpGcnModel model(cfg, init);
  Tape tape;
  const ForwardArtifacts art = model.forward(tape, adj, roles, nullptr);

  CHECK(art.layers.size() == 2);
  CHECK(art.layers[0].attention.size() == 2);  // K = 2 heads
  CHECK(art.layers[1].attention.size() == 1);  // final layer single head
  for (const LayerArtifacts& layer : art.layers) {
    CHECK(layer.t_messages == 2 * 12);
    for (const auto& [a_c, a_t] : layer.attention) {
      for (Eigen::Index i = 0; i < 12; ++i) {
        CHECK(std::abs(a_c->value(i, 0) + a_t->value(i, 0) - 1.0) < 1e-12);
      }
    }
    // role sharing: members of the same role carry identical F_t rows, exactly
    for (int i = 0; i < 12; ++i) {
      for (int j = i + 1; j < 12; ++j) {
        if (roles.member_of[static_cast<std::size_t>(i)] ==
            roles.member_of[static_cast<std::size_t>(j)]) {
          CHECK((layer.conv_t->value.row(i) - layer.conv_t->value.row(j))
                    .cwiseAbs()
                    .maxCoeff() == 0.0);
        }
      }
    }
  }
  // unified width: layer0 outputs K*hidden, final layer outputs hidden
  CHECK(art.layers[0].unified->cols() == 2 * 5);
  CHECK(art.embedding->cols() == 5);
  CHECK(art.log_probs->cols() == 3);
}

TEST_CASE("remove-T ablation with identity attention transform equals a plain GCN") {
  std::mt19937_64 rng(10);
  const Graph g = testutil::random_graph(9, 0.4, rng);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const RoleAssignment roles = random_roles(9, 3, rng);

  ModelConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden = 4;
  cfg.heads = 1;
  cfg.num_classes = 2;
  cfg.input_dim = 9;
  cfg.ablation = Ablation::NoT;
  std::mt19937_64 init(11);
  DpGcnModel model(cfg, init);
  // force the attention transform to the identity
  for (const DpGcnLayer& layer : model.layers()) {
    for (const AttentionHead& head : layer.heads) {
      head.value_weight->value = Matrix::Identity(4, 4);
    }
  }
  Tape tape;
  const ForwardArtifacts art = model.forward(tape, adj, roles, nullptr);

  // independent plain-GCN reference: H_{l+1} = relu(A_hat H W)
  const Matrix a_dense = adj.matrix.to_dense();
  Matrix h = a_dense * model.layers()[0].weight_c->value;  // identity features
  h = h.cwiseMax(0.0);
  h = (a_dense * (h * model.layers()[1].weight_c->value)).cwiseMax(0.0);
  CHECK((art.embedding->value - h).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("end-to-end gradients match finite differences on a 10-node graph") {
  std::mt19937_64 rng(12);
  const Graph g = testutil::random_graph(10, 0.35, rng);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const RoleAssignment roles = random_roles(10, 3, rng);

  ModelConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden = 4;
  cfg.heads = 2;
  cfg.num_classes = 3;
  cfg.input_dim = 10;
  std::mt19937_64 init(13);
  DpGcnModel model(cfg, init);

  std::vector<int> labels(10);
  std::vector<double> weights(10, 0.0);
  for (int i = 0; i < 10; ++i) labels[static_cast<std::size_t>(i)] = i % 3;
  for (int i = 0; i < 7; ++i) weights[static_cast<std::size_t>(i)] = 1.0;  // masked loss

  auto run = [&](bool backward) {
    Tape tape;
    auto art = model.forward(tape, adj, roles, nullptr);
    auto loss = tape.nll_loss(art.log_probs, labels, weights);
    if (backward) tape.backward(loss);
    return loss->value(0, 0);
  };
  run(true);
  CHECK(max_grad_rel_error(model.parameters(), [&] { return run(false); }) < 1e-5);
}

TEST_CASE("explicit feature matrices are accepted and checked") {
  std::mt19937_64 rng(14);
  const Graph g = testutil::random_graph(8, 0.3, rng);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const RoleAssignment roles = random_roles(8, 2, rng);
  ModelConfig cfg;
  cfg.num_layers = 1;
  cfg.hidden = 3;
  cfg.heads = 2;
  cfg.num_classes = 2;
  cfg.input_dim = 5;
  cfg.identity_features = false;
  std::mt19937_64 init(15);
  DpGcnModel model(cfg, init);
  const Matrix features = random_matrix(8, 5, rng);
  Tape tape;
  const ForwardArtifacts art = model.forward(tape, adj, roles, &features);
  CHECK(art.embedding->rows() == 8);
  CHECK(art.embedding->cols() == 3);  // single (final) layer -> one head

  Tape tape2;
  CHECK_THROWS_AS(model.forward(tape2, adj, roles, nullptr), std::invalid_argument);
  const Matrix bad = random_matrix(8, 4, rng);
  CHECK_THROWS_AS(model.forward(tape2, adj, roles, &bad), std::invalid_argument);
}

TEST_CASE("mirror pairs: identical T-path rows every layer; identical final rows under no_c") {
  const MirroredKarate mk = generate_mirrored_karate();
  const Graph& g = mk.bundle.graph;
  const NormalizedAdjacency adj = normalize_adjacency(g);

  // roles from structural features, paired across the mirror
  const StructFeatures f = extract_struct_features(g);
  KMeansConfig km;
  km.k = 20;
  km.seed = 5;
  KMeansResult clusters = kmeans(f.matrix, km);
  std::vector<int> member_of = clusters.assignment;
  for (int i = 0; i < 34; ++i) {
    member_of[static_cast<std::size_t>(i + 34)] = member_of[static_cast<std::size_t>(i)];
  }
  const RoleAssignment roles = build_membership(member_of);

  ModelConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden = 10;
  cfg.heads = 4;
  cfg.num_classes = 2;
  cfg.input_dim = g.num_nodes();

  SUBCASE("full model: F_t rows of mirror pairs are bit-identical at every layer") {
    std::mt19937_64 init(21);
    DpGcnModel model(cfg, init);
    Tape tape;
    const ForwardArtifacts art = model.forward(tape, adj, roles, nullptr);
    for (const LayerArtifacts& layer : art.layers) {
      for (int i = 0; i < 34; ++i) {
        CHECK((layer.conv_t->value.row(i) - layer.conv_t->value.row(i + 34))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
      }
    }
  }
  SUBCASE("no_c ablation: final embeddings of mirror pairs are bit-identical") {
    cfg.ablation = Ablation::NoC;
    std::mt19937_64 init(22);
    DpGcnModel model(cfg, init);
    Tape tape;
    const ForwardArtifacts art = model.forward(tape, adj, roles, nullptr);
    for (int i = 0; i < 34; ++i) {
      CHECK((art.embedding->value.row(i) - art.embedding->value.row(i + 34))
                .cwiseAbs()
                .maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("checkpoint round-trip restores bit-identical behavior") {
  std::mt19937_64 rng(40);
  const Graph g = testutil::random_graph(11, 0.3, rng);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const RoleAssignment roles = random_roles(11, 3, rng);
  ModelConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden = 5;
  cfg.heads = 2;
  cfg.num_classes = 3;
  cfg.input_dim = 11;
  std::mt19937_64 init(41);
  DpGcnModel model(cfg, init);

  const Checkpoint ckpt =
      make_checkpoint(model, roles, 11, g.num_edges(), "toy", "abc123", 0.5, 9);
  const Checkpoint reloaded = checkpoint_from_json(checkpoint_to_json(ckpt));
  CHECK(reloaded.spec_checksum == "abc123");
  CHECK(reloaded.train_seed == 9);
  CHECK(reloaded.member_of == roles.member_of);

  DpGcnModel restored = restore_model(reloaded);
  const RoleAssignment restored_roles = restore_roles(reloaded);
  Tape t1;
  Tape t2;
  const Matrix original = model.forward(t1, adj, roles, nullptr).log_probs->value;
  const Matrix replayed =
      restored.forward(t2, adj, restored_roles, nullptr).log_probs->value;
  CHECK((original - replayed).cwiseAbs().maxCoeff() == 0.0);

  // a wrong-format blob is rejected
  CHECK_THROWS_AS(checkpoint_from_json(nlohmann::json{{"format", "other"}}),
                  std::runtime_error);
}

TEST_CASE("ablation variants change the architecture as specified") {
  std::mt19937_64 rng(30);
  const Graph g = testutil::random_graph(10, 0.3, rng);
  const NormalizedAdjacency adj = normalize_adjacency(g);
  const RoleAssignment roles = random_roles(10, 3, rng);
  ModelConfig cfg;
  cfg.num_layers = 2;
  cfg.hidden = 4;
  cfg.heads = 3;
  cfg.num_classes = 2;
  cfg.input_dim = 10;

  auto run = [&](Ablation a) {
    ModelConfig c = cfg;
    c.ablation = a;
    std::mt19937_64 init(31);
    DpGcnModel model(c, init);
    Tape tape;
    return model.forward(tape, adj, roles, nullptr);
  };

  const ForwardArtifacts no_att = run(Ablation::NoAttention);
  CHECK(no_att.layers[0].attention.empty());
  CHECK(no_att.layers[0].unified->cols() == 4);  // plain mean keeps d_out
  // unweighted mean of the two branches
  const Matrix expected =
      0.5 * (no_att.layers[0].conv_c->value + no_att.layers[0].conv_t->value);
  CHECK((no_att.layers[0].unified->value - expected).cwiseAbs().maxCoeff() == 0.0);

  const ForwardArtifacts single_head = run(Ablation::SingleHead);
  CHECK(single_head.layers[0].attention.size() == 1);
  CHECK(single_head.layers[0].unified->cols() == 4);

  const ForwardArtifacts single_layer = run(Ablation::SingleLayer);
  CHECK(single_layer.layers.size() == 1);

  const ForwardArtifacts no_c = run(Ablation::NoC);
  CHECK(no_c.layers[0].conv_c == nullptr);
  CHECK(no_c.layers[0].attention.empty());  // single branch: weight is exactly 1

  const ForwardArtifacts no_t = run(Ablation::NoT);
  CHECK(no_t.layers[0].conv_t == nullptr);
}
