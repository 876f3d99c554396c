#pragma once

#include <cstdint>

#include "dpgcn/graph.hpp"

namespace dpgcn {

struct KMeansConfig {
  int k = 100;
  std::uint64_t seed = 0;
  int max_iters = 100;
  double tol = 1e-7;   // stop when max centroid shift (L2) drops below
  int restarts = 4;    // k-means++ restarts; best inertia wins
};

struct KMeansResult {
  std::vector<int> assignment;  // per point, dense cluster ids [0, effective_k)
  Matrix centroids;             // effective_k x dim
  double inertia = 0.0;         // sum of squared distances to assigned centroid
  int iterations = 0;
  int effective_k = 0;          // k after clamping to distinct rows
  bool clamped = false;
};

/// Seeded k-means++ with Lloyd iterations. Deterministic for a fixed seed:
/// ties in assignment go to the lowest cluster index, empty clusters are
/// re-seeded to the point farthest from its centroid. k is clamped to the
/// number of distinct point rows (with a warning).
KMeansResult kmeans(const Matrix& points, const KMeansConfig& config);

}  // namespace dpgcn
