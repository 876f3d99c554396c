#pragma once

#include <cstdint>

#include "dpgcn/kmeans.hpp"
#include "dpgcn/struct_features.hpp"

namespace dpgcn {

/// Non-overlapping topology roles. `membership` is the normalized |R| x |N|
/// matrix (entry (r, i) = 1/|m_r| for members), used for the member->role
/// aggregation stage; `share` is its binary n x m counterpart that copies a
/// role row to every member. Transposes are precomputed for backward products.
struct RoleAssignment {
  int num_roles = 0;
  std::vector<int> member_of;    // per node, dense role ids [0, num_roles)
  std::vector<int> role_sizes;   // |m_r| per role, all >= 1
  CsrMatrix membership;          // num_roles x n, rows sum to 1
  CsrMatrix membership_t;        // n x num_roles
  CsrMatrix share;               // n x num_roles, one 1.0 per row
  CsrMatrix share_t;             // num_roles x n
};

/// Builds the membership structures from a per-node role id vector.
/// Empty role ids are compacted away; every node must have a role (>= 0).
RoleAssignment build_membership(const std::vector<int>& member_of);

/// Feature extraction + seeded k-means + membership construction.
RoleAssignment assign_roles(const StructFeatures& features, const KMeansConfig& config);

Matrix spmm(const RoleAssignment& roles, const Matrix& dense,
            MessageCounter* counter = nullptr);

/// O(n^2) threshold-based augmented-path adjacency (small-graph oracle):
/// entry (i, j) = 1 iff cosine similarity of feature rows >= tau, i != j.
struct ThresholdAdjacency {
  CsrMatrix matrix;
  double threshold = 0.0;
};

/// Throws std::invalid_argument when the graph exceeds `max_nodes`
/// (the pairwise pass is quadratic; use the role-based path instead).
ThresholdAdjacency build_threshold_adjacency(const StructFeatures& features,
                                             double tau, int max_nodes = 2000);

}  // namespace dpgcn
