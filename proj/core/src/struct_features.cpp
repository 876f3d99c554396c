#include "dpgcn/struct_features.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dpgcn {

namespace {

int degree_bin(int degree, int bins) {
  // degree >= 1; bin b covers [2^b, 2^{b+1}), last bin absorbs the tail
  int b = 0;
  while ((degree >> (b + 1)) > 0 && b < bins - 1) ++b;
  return b;
}

}  // namespace

StructFeatures extract_struct_features(const Graph& g, int hops, int bins) {
  if (hops < 1) throw std::invalid_argument("extract_struct_features: hops must be >= 1");
  if (bins < 1) throw std::invalid_argument("extract_struct_features: bins must be >= 1");

  const int n = g.num_nodes();
  const int width = 1 + (hops + 1) * bins;
  StructFeatures out;
  out.hops = hops;
  out.bins = bins;
  out.description = "khop-degree-histogram(hops=" + std::to_string(hops) +
                    ",bins=" + std::to_string(bins) + ")";
  out.matrix = Matrix::Zero(n, width);

  // hop-stamped BFS; stamp array reused across source nodes
  std::vector<int> stamp(n, -1);
  std::vector<int> frontier;
  std::vector<int> next;
  std::vector<double> hist(static_cast<std::size_t>(bins), 0.0);

  const CsrMatrix& adj = g.adjacency();
  for (int src = 0; src < n; ++src) {
    out.matrix(src, 0) = std::log1p(static_cast<double>(g.degree(src)));

    frontier.assign(1, src);
    stamp[src] = src;
    for (int k = 0; k <= hops; ++k) {
      std::fill(hist.begin(), hist.end(), 0.0);
      double total = 0.0;
      for (int v : frontier) {
        const int d = g.degree(v);
        if (d >= 1) {
          hist[static_cast<std::size_t>(degree_bin(d, bins))] += 1.0;
          total += 1.0;
        }
      }
      if (total > 0.0) {
        const int base = 1 + k * bins;
        for (int b = 0; b < bins; ++b) out.matrix(src, base + b) = hist[b] / total;
      }
      if (k == hops) break;
      next.clear();
      for (int v : frontier) {
        for (std::int64_t e = adj.row_ptr[v]; e < adj.row_ptr[v + 1]; ++e) {
          const int w = adj.col_idx[e];
          if (stamp[w] != src) {
            stamp[w] = src;
            next.push_back(w);
          }
        }
      }
      frontier.swap(next);
    }
  }
  return out;
}

}  // namespace dpgcn
