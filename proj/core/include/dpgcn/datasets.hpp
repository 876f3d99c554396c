#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dpgcn/graph.hpp"

namespace dpgcn {

/// A labeled graph plus enough provenance (file paths + checksums, or
/// generator parameters + seed) to regenerate it exactly.
struct DatasetBundle {
  Graph graph;
  std::string name;
  nlohmann::json provenance;
};

struct DatasetStats {
  int num_nodes = 0;
  std::int64_t num_edges = 0;
  int num_classes = 0;
};

/// Expected statistics for the named public datasets; empty optional-like
/// zero struct when the name is unknown.
bool known_dataset_stats(const std::string& name, DatasetStats* out);

/// Loads an edge-list + label file pair. Node count = max id + 1 across both
/// files. Label ids are remapped to dense [0, C) preserving numeric order;
/// the mapping is recorded in provenance. When `name` matches a known public
/// dataset the observed statistics are checked against the expected ones and
/// mismatches are reported as warnings on stderr (load still succeeds).
DatasetBundle load_edgelist_dataset(const std::string& edge_path,
                                    const std::string& label_path,
                                    const std::string& name = "");

/// The embedded Zachary karate club network (34 nodes, 78 edges).
const std::vector<std::pair<int, int>>& zachary_karate_edges();

/// Two disjoint isomorphic copies of the karate club (68 nodes, 156 edges).
/// mirror_map[i] is the twin of node i (i <-> i + 34). Labels are the club
/// factions of the original, copied to the mirror.
struct MirroredKarate {
  DatasetBundle bundle;
  std::vector<int> mirror_map;
};
MirroredKarate generate_mirrored_karate();

enum class Motif { Star, Ring, Clique };

/// Disjoint communities, each built from one motif (cycled through
/// `motif_mix`), `community_size` nodes each. Labels are structural-position
/// classes: 0 = star hub, 1 = star leaf, 2 = ring member, 3 = clique member.
/// Node ids are shuffled by `seed`. Ground-truth roles are in provenance.
DatasetBundle generate_planted_roles(int num_communities, const std::vector<Motif>& motif_mix,
                                     int community_size, std::uint64_t seed);

/// Two cliques of `clique_size` joined by a single edge; label = clique id.
/// Connectivity determines the labels; the two cliques are nearly isomorphic.
DatasetBundle generate_clique_pair(int clique_size);

/// Synthetic seller/buyer transaction graph, n nodes total. A fraction of
/// nodes are risky sellers (label 1) planted with fan-in burst motifs: many
/// one-time buyers attached to a single seller. Everything else (normal
/// sellers and buyers) is label 0.
DatasetBundle generate_imbalanced_seller_graph(int n, double risky_fraction,
                                               std::uint64_t seed);

/// Stochastic block model with community-determined labels; connectivity
/// carries the signal, structure is uniform across communities.
DatasetBundle generate_community_graph(int num_communities, int community_size,
                                       double p_in, double p_out, std::uint64_t seed);

/// Manifest describing a loaded dataset: paths, FNV-1a checksums, stats.
nlohmann::json dataset_manifest(const DatasetBundle& bundle);

/// FNV-1a 64-bit hash of a file's bytes, hex-encoded.
std::string file_checksum(const std::string& path);

}  // namespace dpgcn
