#include "dpgcn/roles.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

namespace dpgcn {

RoleAssignment build_membership(const std::vector<int>& member_of) {
  const int n = static_cast<int>(member_of.size());
  if (n == 0) throw std::invalid_argument("build_membership: empty assignment");

  int max_id = -1;
  for (int r : member_of) {
    if (r < 0) throw std::invalid_argument("build_membership: node without a role");
    max_id = std::max(max_id, r);
  }
  // compact away empty role ids, preserving relative order
  std::vector<int> remap(static_cast<std::size_t>(max_id) + 1, -1);
  std::vector<std::int64_t> counts;
  for (int r : member_of) {
    if (remap[static_cast<std::size_t>(r)] == -1) {
      remap[static_cast<std::size_t>(r)] = static_cast<int>(counts.size());
      counts.push_back(0);
    }
  }
  RoleAssignment out;
  out.num_roles = static_cast<int>(counts.size());
  out.member_of.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int r = remap[static_cast<std::size_t>(member_of[static_cast<std::size_t>(i)])];
    out.member_of[static_cast<std::size_t>(i)] = r;
    ++counts[static_cast<std::size_t>(r)];
  }
  out.role_sizes.assign(counts.begin(), counts.end());

  std::vector<std::tuple<int, int, double>> norm_triplets;
  std::vector<std::tuple<int, int, double>> share_triplets;
  norm_triplets.reserve(static_cast<std::size_t>(n));
  share_triplets.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int r = out.member_of[static_cast<std::size_t>(i)];
    norm_triplets.emplace_back(r, i, 1.0 / static_cast<double>(counts[static_cast<std::size_t>(r)]));
    share_triplets.emplace_back(i, r, 1.0);
  }
  out.membership = CsrMatrix::from_triplets(out.num_roles, n, norm_triplets);
  out.membership_t = out.membership.transposed();
  out.share = CsrMatrix::from_triplets(n, out.num_roles, share_triplets);
  out.share_t = out.share.transposed();
  return out;
}

RoleAssignment assign_roles(const StructFeatures& features, const KMeansConfig& config) {
  const KMeansResult km = kmeans(features.matrix, config);
  return build_membership(km.assignment);
}

Matrix spmm(const RoleAssignment& roles, const Matrix& dense, MessageCounter* counter) {
  return spmm(roles.membership, dense, counter);
}

ThresholdAdjacency build_threshold_adjacency(const StructFeatures& features,
                                             double tau, int max_nodes) {
  const int n = static_cast<int>(features.matrix.rows());
  if (n > max_nodes) {
    throw std::invalid_argument(
        "build_threshold_adjacency: " + std::to_string(n) + " nodes exceeds the " +
        std::to_string(max_nodes) +
        "-node oracle limit; the pairwise similarity pass is O(n^2) — use the "
        "role-based path for graphs this size");
  }
  std::vector<double> norms(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) norms[static_cast<std::size_t>(i)] = features.matrix.row(i).norm();

  std::vector<std::tuple<int, int, double>> triplets;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double denom = norms[static_cast<std::size_t>(i)] * norms[static_cast<std::size_t>(j)];
      if (denom == 0.0) continue;  // zero feature rows have no similarity
      const double cos = features.matrix.row(i).dot(features.matrix.row(j)) / denom;
      if (cos >= tau) {
        triplets.emplace_back(i, j, 1.0);
        triplets.emplace_back(j, i, 1.0);
      }
    }
  }
  ThresholdAdjacency out;
  out.threshold = tau;
  out.matrix = CsrMatrix::from_triplets(n, n, std::move(triplets));
  return out;
}

}  // namespace dpgcn
