// dpgcn: dual-path graph convolution experiments from the command line.
//
// Subcommands: ingest, roles, train, eval, embed, mirror-karate, ablate.
// Every run writes its resolved spec + checksum to <out-dir>/run_info.json so
// a stored spec re-runs to identical results.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dpgcn/experiments.hpp"
#include "dpgcn/io.hpp"
#include "dpgcn/struct_features.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliOptions {
  std::string config_path;
  dpgcn::ExperimentSpec spec;
};

/// Loads --config before the flag parse so that explicit flags override the
/// file (CLI11 only assigns bound variables when the option is present).
void preload_config(CliOptions& opt, int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    std::string path;
    if (arg == "--config" && i + 1 < argc) {
      path = argv[i + 1];
    } else if (arg.rfind("--config=", 0) == 0) {
      path = arg.substr(9);
    } else {
      continue;
    }
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    json j;
    in >> j;
    opt.spec = dpgcn::experiment_spec_from_json(j);
    return;
  }
}

std::string out_path(const dpgcn::ExperimentSpec& spec, const std::string& file) {
  return (fs::path(spec.out_dir) / file).string();
}

void write_run_info(const dpgcn::ExperimentSpec& spec, const std::string& command,
                    const std::vector<std::string>& outputs) {
  json info{
      {"command", command},
      {"spec", dpgcn::experiment_spec_to_json(spec)},
      {"spec_checksum", dpgcn::experiment_spec_checksum(spec)},
      {"outputs", outputs},
  };
  dpgcn::write_json(out_path(spec, "run_info.json"), info);
}

void add_dataset_flags(CLI::App* cmd, dpgcn::DatasetSpec& d) {
  cmd->add_option("--dataset-kind", d.kind,
                  "files | mirrored-karate | planted-roles | clique-pair | sellers | community");
  cmd->add_option("--edges", d.edge_path, "edge-list file (kind=files)");
  cmd->add_option("--labels", d.label_path, "label file (kind=files)");
  cmd->add_option("--name", d.name, "dataset name (enables Table-1 stat checks)");
  cmd->add_option("--gen-communities", d.num_communities, "generator: number of communities");
  cmd->add_option("--gen-community-size", d.community_size, "generator: nodes per community");
  cmd->add_option("--gen-motifs", d.motifs, "generator: motif mix (star ring clique)");
  cmd->add_option("--gen-clique-size", d.clique_size, "generator: clique size");
  cmd->add_option("--gen-n", d.n, "generator: total nodes (sellers)");
  cmd->add_option("--gen-risky-fraction", d.risky_fraction, "generator: risky fraction");
  cmd->add_option("--gen-seed", d.seed, "generator seed");
}

void add_role_flags(CLI::App* cmd, dpgcn::RoleSpec& r) {
  cmd->add_option("--k", r.k, "number of topology roles (k-means k)");
  cmd->add_option("--hops", r.hops, "feature hops");
  cmd->add_option("--bins", r.bins, "degree histogram bins");
  cmd->add_option("--role-seed", r.seed, "k-means seed");
  cmd->add_option("--restarts", r.restarts, "k-means restarts");
}

void add_model_flags(CLI::App* cmd, dpgcn::ModelSpec& m) {
  cmd->add_option("--layers", m.layers, "dual-path convolution layers");
  cmd->add_option("--hidden", m.hidden, "hidden width (also per-head attention dim)");
  cmd->add_option("--heads", m.heads, "attention heads in non-final layers");
  cmd->add_flag("--normalize,!--no-normalize", m.normalize,
                "L2-normalize the embedding before the classifier");
  cmd->add_option("--ablation", m.ablation,
                  "full | no_c | no_t | no_attention | single_head | single_layer");
}

void add_train_flags(CLI::App* cmd, dpgcn::TrainConfig& t) {
  cmd->add_option("--fraction", t.train_fraction, "train fraction (stratified)");
  cmd->add_option("--epochs", t.epochs, "max epochs");
  cmd->add_option("--lr", t.lr, "Adam learning rate");
  cmd->add_option("--weight-decay", t.weight_decay, "L2 weight decay");
  cmd->add_option("--patience", t.patience, "early-stop patience on train loss");
  cmd->add_option("--oversample", t.oversample, "minority-class loss weight");
  cmd->add_option("--undersample", t.undersample, "majority-class loss weight");
}

int cmd_ingest(CliOptions& opt) {
  const dpgcn::DatasetBundle bundle = dpgcn::resolve_dataset(opt.spec.dataset);
  const json manifest = dpgcn::dataset_manifest(bundle);
  const std::string path = out_path(opt.spec, "manifest.json");
  dpgcn::write_json(path, manifest);
  write_run_info(opt.spec, "ingest", {path});
  std::cout << "ingested '" << bundle.name << "': " << bundle.graph.num_nodes()
            << " nodes, " << bundle.graph.num_edges() << " edges, "
            << bundle.graph.num_classes() << " classes -> " << path << "\n";
  return 0;
}

int cmd_roles(CliOptions& opt, bool export_features) {
  const dpgcn::DatasetBundle bundle = dpgcn::resolve_dataset(opt.spec.dataset);
  const dpgcn::StructFeatures features = dpgcn::extract_struct_features(
      bundle.graph, opt.spec.roles.hops, opt.spec.roles.bins);
  dpgcn::KMeansConfig km;
  km.k = opt.spec.roles.k;
  km.seed = opt.spec.roles.seed;
  km.restarts = opt.spec.roles.restarts;
  const dpgcn::RoleAssignment roles = dpgcn::assign_roles(features, km);

  std::vector<std::string> outputs;
  const std::string tsv = out_path(opt.spec, "roles.tsv");
  dpgcn::atomic_write(tsv, dpgcn::roles_tsv(roles.member_of));
  outputs.push_back(tsv);
  if (export_features) {
    const std::string csv = out_path(opt.spec, "features.csv");
    dpgcn::atomic_write(csv, dpgcn::features_csv(features.matrix));
    outputs.push_back(csv);
  }
  write_run_info(opt.spec, "roles", outputs);
  std::cout << "assigned " << roles.num_roles << " topology roles over "
            << bundle.graph.num_nodes() << " nodes -> " << tsv << "\n";
  return 0;
}

int cmd_train(CliOptions& opt) {
  const dpgcn::TrainedRun run = dpgcn::run_training(opt.spec);
  const std::string checksum = dpgcn::experiment_spec_checksum(opt.spec);

  const dpgcn::Checkpoint ckpt = dpgcn::make_checkpoint(
      run.model, run.roles, run.bundle.graph.num_nodes(), run.bundle.graph.num_edges(),
      run.bundle.name, checksum, opt.spec.train.train_fraction, opt.spec.train.seed);
  const std::string ckpt_path = out_path(opt.spec, "checkpoint.json");
  dpgcn::save_checkpoint(ckpt_path, ckpt);

  const std::string history_path = out_path(opt.spec, "history.csv");
  dpgcn::atomic_write(history_path, dpgcn::history_csv(run.result.history));

  json eval{{"test", dpgcn::report_to_json(run.test_report)},
            {"all", dpgcn::report_to_json(run.all_report)},
            {"best_epoch", run.result.best_epoch},
            {"best_loss", run.result.best_loss},
            {"stopped_early", run.result.stopped_early},
            {"spec_checksum", checksum}};
  const std::string eval_path = out_path(opt.spec, "eval.json");
  dpgcn::write_json(eval_path, eval);

  write_run_info(opt.spec, "train", {ckpt_path, history_path, eval_path});
  std::cout << "trained on '" << run.bundle.name << "' (" << run.result.history.size()
            << " epochs, best " << run.result.best_epoch << "): test accuracy "
            << run.test_report.accuracy << ", macro-F1 " << run.test_report.macro_f1
            << "\ncheckpoint -> " << ckpt_path << "\n";
  return 0;
}

int cmd_eval(CliOptions& opt, const std::string& checkpoint_path,
             bool export_confusion) {
  const dpgcn::Checkpoint ckpt = dpgcn::load_checkpoint(checkpoint_path);
  const dpgcn::DatasetBundle bundle = dpgcn::resolve_dataset(opt.spec.dataset);
  const dpgcn::InferenceOutput inference = dpgcn::run_inference(ckpt, bundle);

  const int num_classes = ckpt.config.num_classes;
  const dpgcn::SplitMask split =
      dpgcn::make_split(bundle.graph.labels(), ckpt.train_fraction, ckpt.train_seed);
  const dpgcn::EvalReport test_report = dpgcn::evaluate(
      inference.predictions, bundle.graph.labels(), split.test_ids, num_classes);
  std::vector<int> labeled;
  for (int i = 0; i < bundle.graph.num_nodes(); ++i) {
    if (bundle.graph.labels()[static_cast<std::size_t>(i)] >= 0) labeled.push_back(i);
  }
  const dpgcn::EvalReport all_report =
      dpgcn::evaluate(inference.predictions, bundle.graph.labels(), labeled, num_classes);

  json out{{"test", dpgcn::report_to_json(test_report)},
           {"all", dpgcn::report_to_json(all_report)},
           {"checkpoint", checkpoint_path},
           {"spec_checksum", ckpt.spec_checksum}};
  const std::string path = out_path(opt.spec, "eval.json");
  dpgcn::write_json(path, out);
  std::vector<std::string> outputs = {path};
  if (export_confusion) {
    const std::string confusion_path = out_path(opt.spec, "confusion.csv");
    dpgcn::atomic_write(confusion_path, dpgcn::confusion_csv(test_report));
    outputs.push_back(confusion_path);
  }
  write_run_info(opt.spec, "eval", outputs);
  std::cout << "eval: test accuracy " << test_report.accuracy << ", macro-F1 "
            << test_report.macro_f1 << " -> " << path << "\n";
  return 0;
}

int cmd_embed(CliOptions& opt, const std::string& checkpoint_path) {
  const dpgcn::Checkpoint ckpt = dpgcn::load_checkpoint(checkpoint_path);
  const dpgcn::DatasetBundle bundle = dpgcn::resolve_dataset(opt.spec.dataset);
  const dpgcn::InferenceOutput inference = dpgcn::run_inference(ckpt, bundle);
  const std::string path = out_path(opt.spec, "embeddings.csv");
  dpgcn::atomic_write(path, dpgcn::embeddings_csv(inference.embedding));
  write_run_info(opt.spec, "embed", {path});
  std::cout << "wrote " << inference.embedding.rows() << " x "
            << inference.embedding.cols() << " embeddings -> " << path << "\n";
  return 0;
}

int cmd_mirror_karate(CliOptions& opt, int trials, int dim) {
  const dpgcn::MirrorReport report =
      dpgcn::run_mirror_karate(trials, opt.spec.train.seed, dim);

  std::vector<std::string> outputs;
  auto dump = [&](const std::string& file, const std::string& content) {
    const std::string path = out_path(opt.spec, file);
    dpgcn::atomic_write(path, content);
    outputs.push_back(path);
  };
  dump("mirror_embeddings_full.csv", dpgcn::embeddings_csv(report.embedding_full));
  dump("mirror_embeddings_gcn.csv", dpgcn::embeddings_csv(report.embedding_gcn));
  dump("mirror_embeddings_tpath.csv", dpgcn::embeddings_csv(report.embedding_tpath));
  dump("mirror_clusters.tsv", dpgcn::roles_tsv(report.cluster_ids));

  std::string pairs = "node,mirror,distance_full,distance_tpath,nn_rank_full,"
                      "mutual_full,mutual_gcn\n";
  for (const dpgcn::MirrorPairRow& row : report.pairs) {
    pairs += std::to_string(row.node) + "," + std::to_string(row.mirror) + "," +
             dpgcn::format_double(row.distance_full) + "," +
             dpgcn::format_double(row.distance_tpath) + "," +
             std::to_string(row.nn_rank_full) + "," +
             (row.mutual_full ? "1" : "0") + "," + (row.mutual_gcn ? "1" : "0") + "\n";
  }
  dump("mirror_pairs.csv", pairs);

  json j{{"trials", report.trials},
         {"seed", report.seed},
         {"dim", dim},
         {"tpath_max_pair_distance", report.tpath_max_pair_distance},
         {"full_mutual_rate_mean", report.full_mutual_rate_mean},
         {"gcn_mutual_rate_mean", report.gcn_mutual_rate_mean},
         {"full_rates", report.full_rates},
         {"gcn_rates", report.gcn_rates},
         {"spec_checksum", dpgcn::experiment_spec_checksum(opt.spec)}};
  const std::string report_path = out_path(opt.spec, "mirror_report.json");
  dpgcn::write_json(report_path, j);
  outputs.push_back(report_path);

  write_run_info(opt.spec, "mirror-karate", outputs);
  std::cout << "mirror-karate over " << trials << " trials: T-path max pair distance "
            << report.tpath_max_pair_distance << ", mutual-NN rate full "
            << report.full_mutual_rate_mean << " vs GCN " << report.gcn_mutual_rate_mean
            << "\nreport -> " << report_path << "\n";
  return 0;
}

int cmd_ablate(CliOptions& opt, int num_seeds) {
  const std::vector<dpgcn::AblationRow> rows = dpgcn::run_ablation(opt.spec, num_seeds);
  const std::string path = out_path(opt.spec, "ablation.csv");
  dpgcn::atomic_write(path, dpgcn::ablation_csv(rows));
  write_run_info(opt.spec, "ablate", {path});
  std::cout << "ablation over " << num_seeds << " seeds (" << rows.size()
            << " rows) -> " << path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DP-GCN: dual-path graph convolution node classification"};
  app.require_subcommand(1);

  CliOptions opt;
  try {
    preload_config(opt, argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "dpgcn config: error: " << e.what() << "\n";
    return 1;
  }
  app.add_option("--config", opt.config_path, "experiment spec JSON");
  app.add_option("--out-dir", opt.spec.out_dir, "output directory");
  app.add_option("--seed", opt.spec.train.seed, "master training seed");

  auto* ingest = app.add_subcommand("ingest", "load a dataset and write its manifest");
  add_dataset_flags(ingest, opt.spec.dataset);

  auto* roles = app.add_subcommand("roles", "extract features and assign topology roles");
  add_dataset_flags(roles, opt.spec.dataset);
  add_role_flags(roles, opt.spec.roles);
  bool export_features = false;
  roles->add_flag("--features-csv", export_features, "also export features.csv");

  auto* train = app.add_subcommand("train", "train DP-GCN and write checkpoint + history");
  add_dataset_flags(train, opt.spec.dataset);
  add_role_flags(train, opt.spec.roles);
  add_model_flags(train, opt.spec.model);
  add_train_flags(train, opt.spec.train);

  std::string checkpoint_path;
  bool export_confusion = false;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  add_dataset_flags(eval, opt.spec.dataset);
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint.json")->required();
  eval->add_flag("--confusion-csv", export_confusion, "also export confusion.csv");

  auto* embed = app.add_subcommand("embed", "export final unified embeddings as CSV");
  add_dataset_flags(embed, opt.spec.dataset);
  embed->add_option("--checkpoint", checkpoint_path, "checkpoint.json")->required();

  int trials = 25;
  int mirror_dim = 10;
  auto* mirror = app.add_subcommand(
      "mirror-karate", "untrained mirrored-karate embedding experiment");
  mirror->add_option("--trials", trials, "random-weight trials (>= 20 for the report)");
  mirror->add_option("--dim", mirror_dim, "representation dimension");

  int ablate_seeds = 5;
  auto* ablate = app.add_subcommand("ablate", "run the six-variant ablation table");
  add_dataset_flags(ablate, opt.spec.dataset);
  add_role_flags(ablate, opt.spec.roles);
  add_model_flags(ablate, opt.spec.model);
  add_train_flags(ablate, opt.spec.train);
  ablate->add_option("--ablate-seeds", ablate_seeds, "paired seeds per variant");

  CLI11_PARSE(app, argc, argv);

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    if (ingest->parsed()) return cmd_ingest(opt);
    if (roles->parsed()) return cmd_roles(opt, export_features);
    if (train->parsed()) return cmd_train(opt);
    if (eval->parsed()) return cmd_eval(opt, checkpoint_path, export_confusion);
    if (embed->parsed()) return cmd_embed(opt, checkpoint_path);
    if (mirror->parsed()) return cmd_mirror_karate(opt, trials, mirror_dim);
    if (ablate->parsed()) return cmd_ablate(opt, ablate_seeds);
  } catch (const std::exception& e) {
    std::cerr << "dpgcn " << stage << ": error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "dpgcn: no subcommand\n";
  return 1;
}
