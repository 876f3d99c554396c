#pragma once

#include <string>

#include "dpgcn/graph.hpp"

namespace dpgcn {

/// Per-node topology-structure features: column 0 is log(1 + degree), then
/// one block per hop distance k = 0..hops holding the L1-normalized log-binned
/// degree histogram of the nodes exactly k hops away (bin b counts neighbors
/// with degree in [2^b, 2^{b+1})). Nodes with isomorphic k-hop neighborhoods
/// get bit-identical rows.
struct StructFeatures {
  Matrix matrix;  // num_nodes x (1 + (hops+1) * bins)
  int hops = 0;
  int bins = 0;
  std::string description;
};

StructFeatures extract_struct_features(const Graph& g, int hops = 2, int bins = 12);

}  // namespace dpgcn
