#include "dpgcn/datasets.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>

namespace dpgcn {

bool known_dataset_stats(const std::string& name, DatasetStats* out) {
  static const std::map<std::string, DatasetStats> table = {
      {"euro", {399, 5995, 3}},   {"brazil", {131, 1074, 3}},
      {"usa", {1190, 13599, 3}},  {"cora", {2708, 5429, 7}},
      {"karate", {34, 78, 2}},
  };
  auto it = table.find(name);
  if (it == table.end()) return false;
  if (out) *out = it->second;
  return true;
}

std::string file_checksum(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("file_checksum: cannot open " + path);
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a 64
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

DatasetBundle load_edgelist_dataset(const std::string& edge_path,
                                    const std::string& label_path,
                                    const std::string& name) {
  const auto raw_edges = read_edge_list(edge_path);
  const auto raw_labels = read_label_file(label_path);

  int max_id = -1;
  for (const auto& [u, v] : raw_edges) max_id = std::max({max_id, u, v});
  for (const auto& [node, label] : raw_labels) {
    max_id = std::max(max_id, node);
    if (label < 0) {
      throw std::runtime_error("load_edgelist_dataset: negative label for node " +
                               std::to_string(node));
    }
  }
  if (max_id < 0) throw std::runtime_error("load_edgelist_dataset: no nodes found");
  const int n = max_id + 1;

  // remap raw label ids to dense [0, C), preserving numeric order
  std::vector<int> raw_ids;
  for (const auto& [node, label] : raw_labels) raw_ids.push_back(label);
  std::sort(raw_ids.begin(), raw_ids.end());
  raw_ids.erase(std::unique(raw_ids.begin(), raw_ids.end()), raw_ids.end());
  std::map<int, int> remap;
  for (std::size_t i = 0; i < raw_ids.size(); ++i) {
    remap[raw_ids[i]] = static_cast<int>(i);
  }
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  for (const auto& [node, label] : raw_labels) {
    labels[static_cast<std::size_t>(node)] = remap[label];
  }

  DatasetBundle bundle{build_graph(raw_edges, n).with_labels(std::move(labels)),
                       name.empty() ? "unnamed" : name,
                       nlohmann::json{}};
  bundle.provenance = {
      {"kind", "files"},
      {"edge_path", edge_path},
      {"label_path", label_path},
      {"edge_checksum", file_checksum(edge_path)},
      {"label_checksum", file_checksum(label_path)},
      {"label_id_map", remap},
  };

  DatasetStats expected;
  if (!name.empty() && known_dataset_stats(name, &expected)) {
    const auto observed_nodes = bundle.graph.num_nodes();
    const auto observed_edges = bundle.graph.num_edges();
    const auto observed_classes = bundle.graph.num_classes();
    if (observed_nodes != expected.num_nodes || observed_edges != expected.num_edges ||
        observed_classes != expected.num_classes) {
      std::cerr << "[dpgcn] warning: dataset '" << name << "' statistics differ from "
                << "the expected values: nodes " << observed_nodes << " (expected "
                << expected.num_nodes << "), edges " << observed_edges << " (expected "
                << expected.num_edges << "), classes " << observed_classes
                << " (expected " << expected.num_classes << ")\n";
    }
  }
  return bundle;
}

const std::vector<std::pair<int, int>>& zachary_karate_edges() {
  static const std::vector<std::pair<int, int>> edges = {
      {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},
      {0, 8},   {0, 10},  {0, 11},  {0, 12},  {0, 13},  {0, 17},  {0, 19},
      {0, 21},  {0, 31},  {1, 2},   {1, 3},   {1, 7},   {1, 13},  {1, 17},
      {1, 19},  {1, 21},  {1, 30},  {2, 3},   {2, 7},   {2, 8},   {2, 9},
      {2, 13},  {2, 27},  {2, 28},  {2, 32},  {3, 7},   {3, 12},  {3, 13},
      {4, 6},   {4, 10},  {5, 6},   {5, 10},  {5, 16},  {6, 16},  {8, 30},
      {8, 32},  {8, 33},  {9, 33},  {13, 33}, {14, 32}, {14, 33}, {15, 32},
      {15, 33}, {18, 32}, {18, 33}, {19, 33}, {20, 32}, {20, 33}, {22, 32},
      {22, 33}, {23, 25}, {23, 27}, {23, 29}, {23, 32}, {23, 33}, {24, 25},
      {24, 27}, {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31},
      {28, 33}, {29, 32}, {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33},
      {32, 33},
  };
  return edges;
}

namespace {

const std::vector<int>& karate_faction_labels() {
  static const std::vector<int> labels = {0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0,
                                          0, 0, 1, 1, 0, 0, 1, 0, 1, 0, 1, 1,
                                          1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  return labels;
}

}  // namespace

MirroredKarate generate_mirrored_karate() {
  const int n = 34;
  std::vector<std::pair<int, int>> edges = zachary_karate_edges();
  const std::size_t original = edges.size();
  for (std::size_t i = 0; i < original; ++i) {
    edges.emplace_back(edges[i].first + n, edges[i].second + n);
  }
  std::vector<int> labels = karate_faction_labels();
  labels.insert(labels.end(), karate_faction_labels().begin(),
                karate_faction_labels().end());

  MirroredKarate out;
  out.bundle.graph = build_graph(edges, 2 * n).with_labels(std::move(labels));
  out.bundle.name = "mirrored-karate";
  out.bundle.provenance = {{"kind", "mirrored-karate"}, {"copies", 2}};
  out.mirror_map.resize(2 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.mirror_map[static_cast<std::size_t>(i)] = i + n;
    out.mirror_map[static_cast<std::size_t>(i + n)] = i;
  }
  return out;
}

DatasetBundle generate_planted_roles(int num_communities, const std::vector<Motif>& motif_mix,
                                     int community_size, std::uint64_t seed) {
  if (num_communities < 1 || community_size < 3) {
    throw std::invalid_argument("generate_planted_roles: need >= 1 communities of >= 3 nodes");
  }
  if (motif_mix.empty()) {
    throw std::invalid_argument("generate_planted_roles: empty motif mix");
  }
  const int n = num_communities * community_size;
  std::vector<int> ids(static_cast<std::size_t>(n));
  std::iota(ids.begin(), ids.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);

  std::vector<std::pair<int, int>> edges;
  std::vector<int> labels(static_cast<std::size_t>(n), -1);
  std::vector<int> true_roles(static_cast<std::size_t>(n), -1);
  int next = 0;
  for (int c = 0; c < num_communities; ++c) {
    const Motif motif = motif_mix[static_cast<std::size_t>(c) % motif_mix.size()];
    std::vector<int> members(static_cast<std::size_t>(community_size));
    for (int& m : members) m = ids[static_cast<std::size_t>(next++)];
    switch (motif) {
      case Motif::Star:
        for (int i = 1; i < community_size; ++i) edges.emplace_back(members[0], members[static_cast<std::size_t>(i)]);
        labels[static_cast<std::size_t>(members[0])] = 0;  // hub
        true_roles[static_cast<std::size_t>(members[0])] = 0;
        for (int i = 1; i < community_size; ++i) {
          labels[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = 1;  // leaf
          true_roles[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = 1;
        }
        break;
      case Motif::Ring:
        for (int i = 0; i < community_size; ++i) {
          edges.emplace_back(members[static_cast<std::size_t>(i)],
                             members[static_cast<std::size_t>((i + 1) % community_size)]);
          labels[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = 2;
          true_roles[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = 2;
        }
        break;
      case Motif::Clique:
        for (int i = 0; i < community_size; ++i) {
          for (int j = i + 1; j < community_size; ++j) {
            edges.emplace_back(members[static_cast<std::size_t>(i)],
                               members[static_cast<std::size_t>(j)]);
          }
          labels[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = 3;
          true_roles[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = 3;
        }
        break;
    }
  }
  // compact labels to [0, C) in case the mix misses a motif type
  std::vector<int> present;
  for (int y : labels) present.push_back(y);
  std::sort(present.begin(), present.end());
  present.erase(std::unique(present.begin(), present.end()), present.end());
  for (int& y : labels) {
    y = static_cast<int>(std::lower_bound(present.begin(), present.end(), y) -
                         present.begin());
  }

  DatasetBundle bundle{build_graph(edges, n).with_labels(std::move(labels)),
                       "planted-roles", nlohmann::json{}};
  std::vector<std::string> motif_names;
  for (Motif m : motif_mix) {
    motif_names.push_back(m == Motif::Star ? "star" : m == Motif::Ring ? "ring" : "clique");
  }
  bundle.provenance = {{"kind", "planted-roles"},
                       {"num_communities", num_communities},
                       {"community_size", community_size},
                       {"motifs", motif_names},
                       {"seed", seed},
                       {"true_roles", true_roles}};
  return bundle;
}

DatasetBundle generate_clique_pair(int clique_size) {
  if (clique_size < 2) throw std::invalid_argument("generate_clique_pair: size >= 2");
  const int n = 2 * clique_size;
  std::vector<std::pair<int, int>> edges;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int side = 0; side < 2; ++side) {
    const int base = side * clique_size;
    for (int i = 0; i < clique_size; ++i) {
      labels[static_cast<std::size_t>(base + i)] = side;
      for (int j = i + 1; j < clique_size; ++j) {
        edges.emplace_back(base + i, base + j);
      }
    }
  }
  edges.emplace_back(0, clique_size);  // the single bridge
  DatasetBundle bundle{build_graph(edges, n).with_labels(std::move(labels)),
                       "clique-pair", nlohmann::json{}};
  bundle.provenance = {{"kind", "clique-pair"}, {"clique_size", clique_size}};
  return bundle;
}

DatasetBundle generate_imbalanced_seller_graph(int n, double risky_fraction,
                                               std::uint64_t seed) {
  if (n < 100) throw std::invalid_argument("generate_imbalanced_seller_graph: n >= 100");
  if (risky_fraction <= 0.0 || risky_fraction >= 0.5) {
    throw std::invalid_argument("generate_imbalanced_seller_graph: fraction in (0, 0.5)");
  }
  std::mt19937_64 rng(seed);
  const int num_risky = static_cast<int>(std::lround(risky_fraction * n));
  const int num_sellers = std::max(num_risky * 2, n / 10);
  const int num_buyers = n - num_sellers;

  // node layout: sellers [0, num_sellers), buyers [num_sellers, n);
  // risky seller ids are drawn uniformly from the sellers
  std::vector<int> seller_ids(static_cast<std::size_t>(num_sellers));
  std::iota(seller_ids.begin(), seller_ids.end(), 0);
  std::shuffle(seller_ids.begin(), seller_ids.end(), rng);

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < num_risky; ++i) labels[static_cast<std::size_t>(seller_ids[static_cast<std::size_t>(i)])] = 1;

  // one-time buyers are consumed sequentially from a shuffled pool so that
  // risky fan-in bursts attach to buyers that appear nowhere else
  std::vector<int> buyer_pool(static_cast<std::size_t>(num_buyers));
  std::iota(buyer_pool.begin(), buyer_pool.end(), num_sellers);
  std::shuffle(buyer_pool.begin(), buyer_pool.end(), rng);
  std::size_t pool_next = 0;

  std::set<std::pair<int, int>> edge_set;
  std::uniform_int_distribution<int> normal_degree(8, 20);
  std::uniform_int_distribution<int> risky_degree(25, 40);
  std::uniform_int_distribution<int> any_buyer(num_sellers, n - 1);

  for (int s = 0; s < num_sellers; ++s) {
    if (labels[static_cast<std::size_t>(s)] == 1) {
      // fan-in burst: many single-use buyers
      const int d = risky_degree(rng);
      for (int e = 0; e < d; ++e) {
        int buyer;
        if (pool_next < buyer_pool.size()) {
          buyer = buyer_pool[pool_next++];
        } else {
          buyer = any_buyer(rng);
        }
        edge_set.emplace(s, buyer);
      }
    } else {
      // returning buyers shared across normal sellers
      const int d = normal_degree(rng);
      for (int e = 0; e < d; ++e) edge_set.emplace(s, any_buyer(rng));
    }
  }
  std::vector<std::pair<int, int>> edges(edge_set.begin(), edge_set.end());
  // attach buyers that ended up isolated to two normal sellers each
  std::vector<int> degree(static_cast<std::size_t>(n), 0);
  for (const auto& [u, v] : edges) {
    ++degree[static_cast<std::size_t>(u)];
    ++degree[static_cast<std::size_t>(v)];
  }
  std::vector<int> normal_sellers;
  for (int s = 0; s < num_sellers; ++s) {
    if (labels[static_cast<std::size_t>(s)] == 0) normal_sellers.push_back(s);
  }
  std::uniform_int_distribution<std::size_t> pick_normal(0, normal_sellers.size() - 1);
  for (int b = num_sellers; b < n; ++b) {
    if (degree[static_cast<std::size_t>(b)] == 0) {
      const int s1 = normal_sellers[pick_normal(rng)];
      int s2 = normal_sellers[pick_normal(rng)];
      while (s2 == s1) s2 = normal_sellers[pick_normal(rng)];
      edges.emplace_back(s1, b);
      edges.emplace_back(s2, b);
    }
  }

  DatasetBundle bundle{build_graph(edges, n).with_labels(std::move(labels)),
                       "imbalanced-sellers", nlohmann::json{}};
  bundle.provenance = {{"kind", "imbalanced-sellers"},
                       {"n", n},
                       {"risky_fraction", risky_fraction},
                       {"num_risky", num_risky},
                       {"num_sellers", num_sellers},
                       {"seed", seed}};
  return bundle;
}

DatasetBundle generate_community_graph(int num_communities, int community_size,
                                       double p_in, double p_out, std::uint64_t seed) {
  if (num_communities < 2 || community_size < 2) {
    throw std::invalid_argument("generate_community_graph: need >= 2 communities of >= 2");
  }
  const int n = num_communities * community_size;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::pair<int, int>> edges;
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = i / community_size;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double p = labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)] ? p_in : p_out;
      if (u(rng) < p) edges.emplace_back(i, j);
    }
  }
  DatasetBundle bundle{build_graph(edges, n).with_labels(std::move(labels)),
                       "community-sbm", nlohmann::json{}};
  bundle.provenance = {{"kind", "community-sbm"},
                       {"num_communities", num_communities},
                       {"community_size", community_size},
                       {"p_in", p_in},
                       {"p_out", p_out},
                       {"seed", seed}};
  return bundle;
}

nlohmann::json dataset_manifest(const DatasetBundle& bundle) {
  nlohmann::json manifest{
      {"name", bundle.name},
      {"num_nodes", bundle.graph.num_nodes()},
      {"num_edges", bundle.graph.num_edges()},
      {"num_classes", bundle.graph.num_classes()},
      {"provenance", bundle.provenance},
  };
  DatasetStats expected;
  if (known_dataset_stats(bundle.name, &expected)) {
    manifest["expected"] = {{"num_nodes", expected.num_nodes},
                            {"num_edges", expected.num_edges},
                            {"num_classes", expected.num_classes}};
  }
  return manifest;
}

}  // namespace dpgcn
