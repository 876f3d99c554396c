#include "dpgcn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "dpgcn/io.hpp"
#include "dpgcn/struct_features.hpp"

namespace dpgcn {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t z = base ^ (tag * 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

nlohmann::json experiment_spec_to_json(const ExperimentSpec& spec) {
  return nlohmann::json{
      {"dataset",
       {{"kind", spec.dataset.kind},
        {"name", spec.dataset.name},
        {"edge_path", spec.dataset.edge_path},
        {"label_path", spec.dataset.label_path},
        {"num_communities", spec.dataset.num_communities},
        {"community_size", spec.dataset.community_size},
        {"motifs", spec.dataset.motifs},
        {"clique_size", spec.dataset.clique_size},
        {"n", spec.dataset.n},
        {"risky_fraction", spec.dataset.risky_fraction},
        {"p_in", spec.dataset.p_in},
        {"p_out", spec.dataset.p_out},
        {"seed", spec.dataset.seed}}},
      {"roles",
       {{"k", spec.roles.k},
        {"hops", spec.roles.hops},
        {"bins", spec.roles.bins},
        {"seed", spec.roles.seed},
        {"restarts", spec.roles.restarts}}},
      {"model",
       {{"layers", spec.model.layers},
        {"hidden", spec.model.hidden},
        {"heads", spec.model.heads},
        {"normalize", spec.model.normalize},
        {"ablation", spec.model.ablation}}},
      {"train",
       {{"fraction", spec.train.train_fraction},
        {"epochs", spec.train.epochs},
        {"lr", spec.train.lr},
        {"weight_decay", spec.train.weight_decay},
        {"seed", spec.train.seed},
        {"patience", spec.train.patience},
        {"oversample", spec.train.oversample},
        {"undersample", spec.train.undersample}}},
      {"out_dir", spec.out_dir},
  };
}

ExperimentSpec experiment_spec_from_json(const nlohmann::json& j) {
  ExperimentSpec spec;
  if (j.contains("dataset")) {
    const auto& d = j.at("dataset");
    spec.dataset.kind = d.value("kind", spec.dataset.kind);
    spec.dataset.name = d.value("name", spec.dataset.name);
    spec.dataset.edge_path = d.value("edge_path", spec.dataset.edge_path);
    spec.dataset.label_path = d.value("label_path", spec.dataset.label_path);
    spec.dataset.num_communities = d.value("num_communities", spec.dataset.num_communities);
    spec.dataset.community_size = d.value("community_size", spec.dataset.community_size);
    spec.dataset.motifs = d.value("motifs", spec.dataset.motifs);
    spec.dataset.clique_size = d.value("clique_size", spec.dataset.clique_size);
    spec.dataset.n = d.value("n", spec.dataset.n);
    spec.dataset.risky_fraction = d.value("risky_fraction", spec.dataset.risky_fraction);
    spec.dataset.p_in = d.value("p_in", spec.dataset.p_in);
    spec.dataset.p_out = d.value("p_out", spec.dataset.p_out);
    spec.dataset.seed = d.value("seed", spec.dataset.seed);
  }
  if (j.contains("roles")) {
    const auto& r = j.at("roles");
    spec.roles.k = r.value("k", spec.roles.k);
    spec.roles.hops = r.value("hops", spec.roles.hops);
    spec.roles.bins = r.value("bins", spec.roles.bins);
    spec.roles.seed = r.value("seed", spec.roles.seed);
    spec.roles.restarts = r.value("restarts", spec.roles.restarts);
  }
  if (j.contains("model")) {
    const auto& m = j.at("model");
    spec.model.layers = m.value("layers", spec.model.layers);
    spec.model.hidden = m.value("hidden", spec.model.hidden);
    spec.model.heads = m.value("heads", spec.model.heads);
    spec.model.normalize = m.value("normalize", spec.model.normalize);
    spec.model.ablation = m.value("ablation", spec.model.ablation);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    spec.train.train_fraction = t.value("fraction", spec.train.train_fraction);
    spec.train.epochs = t.value("epochs", spec.train.epochs);
    spec.train.lr = t.value("lr", spec.train.lr);
    spec.train.weight_decay = t.value("weight_decay", spec.train.weight_decay);
    spec.train.seed = t.value("seed", spec.train.seed);
    spec.train.patience = t.value("patience", spec.train.patience);
    spec.train.oversample = t.value("oversample", spec.train.oversample);
    spec.train.undersample = t.value("undersample", spec.train.undersample);
  }
  spec.out_dir = j.value("out_dir", spec.out_dir);
  return spec;
}

std::string experiment_spec_checksum(const ExperimentSpec& spec) {
  // out_dir only says where artifacts land; identical experiments written to
  // different directories must carry the same checksum
  ExperimentSpec canonical = spec;
  canonical.out_dir.clear();
  return string_checksum(experiment_spec_to_json(canonical).dump());
}

DatasetBundle resolve_dataset(const DatasetSpec& spec) {
  if (spec.kind == "files") {
    if (spec.edge_path.empty() || spec.label_path.empty()) {
      throw std::invalid_argument("dataset: kind 'files' needs edge_path and label_path");
    }
    return load_edgelist_dataset(spec.edge_path, spec.label_path, spec.name);
  }
  if (spec.kind == "mirrored-karate") return generate_mirrored_karate().bundle;
  if (spec.kind == "planted-roles") {
    std::vector<Motif> mix;
    for (const std::string& m : spec.motifs) {
      if (m == "star") mix.push_back(Motif::Star);
      else if (m == "ring") mix.push_back(Motif::Ring);
      else if (m == "clique") mix.push_back(Motif::Clique);
      else throw std::invalid_argument("dataset: unknown motif '" + m + "'");
    }
    return generate_planted_roles(spec.num_communities, mix, spec.community_size,
                                  spec.seed);
  }
  if (spec.kind == "clique-pair") return generate_clique_pair(spec.clique_size);
  if (spec.kind == "sellers") {
    return generate_imbalanced_seller_graph(spec.n, spec.risky_fraction, spec.seed);
  }
  if (spec.kind == "community") {
    return generate_community_graph(spec.num_communities, spec.community_size,
                                    spec.p_in, spec.p_out, spec.seed);
  }
  throw std::invalid_argument("dataset: unknown kind '" + spec.kind + "'");
}

RoleAssignment compute_roles(const Graph& graph, const RoleSpec& spec) {
  const StructFeatures features = extract_struct_features(graph, spec.hops, spec.bins);
  KMeansConfig km;
  km.k = spec.k;
  km.seed = spec.seed;
  km.restarts = spec.restarts;
  return assign_roles(features, km);
}

ModelConfig make_model_config(const ExperimentSpec& spec, int num_nodes, int num_classes) {
  ModelConfig cfg;
  cfg.num_layers = spec.model.layers;
  cfg.hidden = spec.model.hidden;
  cfg.heads = spec.model.heads;
  cfg.num_classes = num_classes;
  cfg.input_dim = num_nodes;
  cfg.identity_features = true;
  cfg.normalize_embedding = spec.model.normalize;
  cfg.ablation = ablation_from_string(spec.model.ablation);
  return cfg;
}

TrainedRun run_training(const ExperimentSpec& spec) {
  DatasetBundle bundle = resolve_dataset(spec.dataset);
  const NormalizedAdjacency adj = normalize_adjacency(bundle.graph);
  RoleAssignment roles = compute_roles(bundle.graph, spec.roles);

  const int num_classes = bundle.graph.num_classes();
  if (num_classes < 2) {
    throw std::invalid_argument("run_training: dataset has fewer than 2 classes");
  }
  ModelConfig cfg = make_model_config(spec, bundle.graph.num_nodes(), num_classes);
  std::mt19937_64 init_rng(derive_seed(spec.train.seed, 0xA110C));
  DpGcnModel model(cfg, init_rng);

  SplitMask split =
      make_split(bundle.graph.labels(), spec.train.train_fraction, spec.train.seed);
  TrainResult result =
      train(bundle.graph, adj, roles, nullptr, model, split, spec.train);

  Tape tape;
  ForwardArtifacts art = model.forward(tape, adj, roles, nullptr);
  const std::vector<int> preds = predict(art.log_probs->value);
  EvalReport test_report =
      evaluate(preds, bundle.graph.labels(), split.test_ids, num_classes);
  std::vector<int> labeled_ids;
  for (int i = 0; i < bundle.graph.num_nodes(); ++i) {
    if (bundle.graph.labels()[static_cast<std::size_t>(i)] >= 0) labeled_ids.push_back(i);
  }
  EvalReport all_report =
      evaluate(preds, bundle.graph.labels(), labeled_ids, num_classes);

  return TrainedRun{std::move(bundle), std::move(roles),   std::move(model),
                    std::move(split),  std::move(result),  std::move(test_report),
                    std::move(all_report), art.embedding->value};
}

InferenceOutput run_inference(const Checkpoint& ckpt, const DatasetBundle& bundle) {
  if (ckpt.num_nodes != bundle.graph.num_nodes()) {
    throw std::invalid_argument(
        "run_inference: checkpoint was trained on a " + std::to_string(ckpt.num_nodes) +
        "-node graph but the dataset has " + std::to_string(bundle.graph.num_nodes()) +
        " nodes (model dimensions are tied to the graph)");
  }
  DpGcnModel model = restore_model(ckpt);
  RoleAssignment roles = restore_roles(ckpt);
  const NormalizedAdjacency adj = normalize_adjacency(bundle.graph);
  Tape tape;
  ForwardArtifacts art = model.forward(tape, adj, roles, nullptr);
  InferenceOutput out;
  out.embedding = art.embedding->value;
  out.log_probs = art.log_probs->value;
  out.predictions = predict(out.log_probs);
  return out;
}

namespace {

/// index of the nearest neighbor of row i (excluding i), ties to lowest index
int nearest_neighbor(const Matrix& points, int i) {
  double best = std::numeric_limits<double>::infinity();
  int arg = -1;
  for (int j = 0; j < points.rows(); ++j) {
    if (j == i) continue;
    const double d = (points.row(i) - points.row(j)).squaredNorm();
    if (d < best) {
      best = d;
      arg = j;
    }
  }
  return arg;
}

double mutual_mirror_rate(const Matrix& points, const std::vector<int>& mirror_map) {
  const int half = static_cast<int>(mirror_map.size()) / 2;
  int mutual = 0;
  for (int i = 0; i < half; ++i) {
    const int m = mirror_map[static_cast<std::size_t>(i)];
    if (nearest_neighbor(points, i) == m && nearest_neighbor(points, m) == i) ++mutual;
  }
  return static_cast<double>(mutual) / static_cast<double>(half);
}

}  // namespace

MirrorReport run_mirror_karate(int trials, std::uint64_t seed, int dim) {
  if (trials < 1) throw std::invalid_argument("run_mirror_karate: trials >= 1");
  MirroredKarate mk = generate_mirrored_karate();
  const Graph& graph = mk.bundle.graph;
  const int n = graph.num_nodes();
  const NormalizedAdjacency adj = normalize_adjacency(graph);

  // roles from structural features, then explicitly paired across the mirror
  const StructFeatures features = extract_struct_features(graph);
  KMeansConfig km;
  km.k = 100;  // clamps to the number of distinct rows
  km.seed = derive_seed(seed, 0x701E5);
  KMeansResult clusters = kmeans(features.matrix, km);
  std::vector<int> member_of = clusters.assignment;
  for (int i = 0; i < n / 2; ++i) {
    member_of[static_cast<std::size_t>(mk.mirror_map[static_cast<std::size_t>(i)])] =
        member_of[static_cast<std::size_t>(i)];
  }
  const RoleAssignment roles = build_membership(member_of);

  MirrorReport report;
  report.trials = trials;
  report.seed = seed;

  auto run_variant = [&](Ablation ablation, std::uint64_t trial_seed) {
    ModelConfig cfg;
    cfg.num_layers = 2;
    cfg.hidden = dim;
    cfg.heads = 4;
    cfg.num_classes = 2;
    cfg.input_dim = n;
    cfg.ablation = ablation;
    std::mt19937_64 rng(trial_seed);
    DpGcnModel model(cfg, rng);
    Tape tape;
    return model.forward(tape, adj, roles, nullptr).embedding->value;
  };

  for (int t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = derive_seed(seed, static_cast<std::uint64_t>(t) + 1);
    const Matrix full = run_variant(Ablation::Full, trial_seed);
    const Matrix gcn = run_variant(Ablation::NoT, trial_seed);
    const Matrix tpath = run_variant(Ablation::NoC, trial_seed);

    for (int i = 0; i < n / 2; ++i) {
      const int m = mk.mirror_map[static_cast<std::size_t>(i)];
      report.tpath_max_pair_distance =
          std::max(report.tpath_max_pair_distance,
                   (tpath.row(i) - tpath.row(m)).norm());
    }
    report.full_rates.push_back(mutual_mirror_rate(full, mk.mirror_map));
    report.gcn_rates.push_back(mutual_mirror_rate(gcn, mk.mirror_map));

    if (t == 0) {
      report.embedding_full = full;
      report.embedding_gcn = gcn;
      report.embedding_tpath = tpath;
      for (int i = 0; i < n; ++i) {
        Eigen::Index arg = 0;
        full.row(i).maxCoeff(&arg);  // log-softmax preserves the row argmax
        report.cluster_ids.push_back(static_cast<int>(arg));
      }
      for (int i = 0; i < n / 2; ++i) {
        const int m = mk.mirror_map[static_cast<std::size_t>(i)];
        MirrorPairRow row;
        row.node = i;
        row.mirror = m;
        row.distance_full = (full.row(i) - full.row(m)).norm();
        row.distance_tpath = (tpath.row(i) - tpath.row(m)).norm();
        int rank = 1;
        for (int j = 0; j < n; ++j) {
          if (j == i || j == m) continue;
          if ((full.row(i) - full.row(j)).squaredNorm() <
              (full.row(i) - full.row(m)).squaredNorm()) {
            ++rank;
          }
        }
        row.nn_rank_full = rank;
        row.mutual_full =
            nearest_neighbor(full, i) == m && nearest_neighbor(full, m) == i;
        row.mutual_gcn = nearest_neighbor(gcn, i) == m && nearest_neighbor(gcn, m) == i;
        report.pairs.push_back(row);
      }
    }
  }
  double full_sum = 0.0;
  double gcn_sum = 0.0;
  for (double r : report.full_rates) full_sum += r;
  for (double r : report.gcn_rates) gcn_sum += r;
  report.full_mutual_rate_mean = full_sum / trials;
  report.gcn_mutual_rate_mean = gcn_sum / trials;
  return report;
}

std::vector<AblationRow> run_ablation(const ExperimentSpec& spec, int num_seeds) {
  static const std::vector<std::string> variants = {
      "full", "no_c", "no_t", "no_attention", "single_head", "single_layer"};
  std::vector<AblationRow> rows;
  for (int s = 0; s < num_seeds; ++s) {
    for (const std::string& variant : variants) {
      ExperimentSpec run_spec = spec;
      run_spec.model.ablation = variant;
      run_spec.train.seed = spec.train.seed + static_cast<std::uint64_t>(s);
      TrainedRun run = run_training(run_spec);
      rows.push_back(AblationRow{variant, run_spec.train.seed,
                                 run.test_report.accuracy, run.test_report.macro_f1});
    }
  }
  return rows;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string out = "variant,seed,accuracy,macro_f1\n";
  for (const AblationRow& r : rows) {
    out += r.variant + "," + std::to_string(r.seed) + "," + format_double(r.accuracy) +
           "," + format_double(r.macro_f1) + "\n";
  }
  std::map<std::string, std::pair<double, int>> means;
  for (const AblationRow& r : rows) {
    means[r.variant].first += r.macro_f1;
    ++means[r.variant].second;
  }
  for (const auto& [variant, acc] : means) {
    out += variant + ",mean,," + format_double(acc.first / acc.second) + "\n";
  }
  return out;
}

}  // namespace dpgcn
