#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace dpgcn {

/// Dense float64 matrix, row-major so that per-row kernels (CSR products,
/// row-wise softmax, feature histograms) walk contiguous memory.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Counts messages (one per stored nonzero) moved by sparse products.
struct MessageCounter {
  std::int64_t messages = 0;
};

/// Row-compressed sparse matrix with sorted column indices per row.
/// Iteration order is fixed, so products accumulate deterministically.
struct CsrMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<std::int64_t> row_ptr;  // size rows + 1
  std::vector<int> col_idx;           // sorted within each row
  std::vector<double> values;

  std::int64_t nnz() const { return static_cast<std::int64_t>(col_idx.size()); }
  double at(int r, int c) const;
  Matrix to_dense() const;
  CsrMatrix transposed() const;

  /// Builds from (row, col, value) triplets; duplicates are summed.
  static CsrMatrix from_triplets(
      int rows, int cols, std::vector<std::tuple<int, int, double>> triplets);
};

/// Sparse-dense product `a * x`. Accumulates row by row over sorted columns.
/// `counter`, when given, is incremented by nnz(a) (one message per edge).
Matrix spmm(const CsrMatrix& a, const Matrix& x, MessageCounter* counter = nullptr);

enum class NodeMask : std::uint8_t { Unlabeled = 0, Train = 1, Test = 2 };

/// Immutable undirected graph. Edges are deduplicated and symmetrized at
/// construction; adjacency stores no self-loops (the self term enters the
/// convolution through the +I of the normalized operator).
class Graph {
 public:
  Graph() = default;  // empty placeholder; build_graph produces real instances
  Graph(const std::vector<std::pair<int, int>>& edge_list, int num_nodes);

  int num_nodes() const { return num_nodes_; }
  /// Number of undirected edges after dedup.
  std::int64_t num_edges() const { return static_cast<std::int64_t>(edges_.size()); }
  /// Canonical edge list: u < v, lexicographically sorted.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const CsrMatrix& adjacency() const { return adjacency_; }
  int degree(int v) const { return degrees_[v]; }
  const std::vector<int>& degrees() const { return degrees_; }
  /// Neighbors of v in increasing id order.
  std::vector<int> neighbors(int v) const;

  bool has_labels() const { return !labels_.empty(); }
  /// Per-node class id, -1 where unlabeled. Empty when the graph carries no labels.
  const std::vector<int>& labels() const { return labels_; }
  const std::vector<NodeMask>& label_mask() const { return label_mask_; }
  int num_classes() const;

  /// Returns a copy carrying the given labels (-1 = unlabeled).
  Graph with_labels(std::vector<int> labels,
                    std::vector<NodeMask> mask = {}) const;

 private:
  int num_nodes_ = 0;
  std::vector<std::pair<int, int>> edges_;
  CsrMatrix adjacency_;
  std::vector<int> degrees_;
  std::vector<int> labels_;
  std::vector<NodeMask> label_mask_;
};

/// Builds an undirected graph from a raw edge list. Duplicate edges and both
/// orientations collapse to a single undirected edge; self-loops are dropped.
/// Throws std::invalid_argument for ids outside [0, num_nodes) or num_nodes == 0.
Graph build_graph(const std::vector<std::pair<int, int>>& edge_list, int num_nodes);

/// Symmetric-normalized connectivity operator D^{-1/2} (A + I) D^{-1/2}.
struct NormalizedAdjacency {
  CsrMatrix matrix;                  // symmetric, diagonal 1/(deg+1)
  std::vector<int> source_degrees;   // deg + 1 per node
};

/// Entry (i, j) = 1 / sqrt(d_i * d_j) with d = deg + 1. The product sits
/// under a single sqrt so mirrored entries are bit-identical and integer
/// perfect squares stay exact.
NormalizedAdjacency normalize_adjacency(const Graph& g);

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& x,
            MessageCounter* counter = nullptr);

/// Parses an edge-list file: one edge per line, two whitespace-separated
/// integer node ids, '#' comments and blank lines ignored.
/// Throws std::runtime_error naming the offending line on malformed input.
std::vector<std::pair<int, int>> read_edge_list(const std::string& path);

/// Parses a label file: `node_id<TAB>label_id` per line ('#' comments allowed).
std::vector<std::pair<int, int>> read_label_file(const std::string& path);

}  // namespace dpgcn
