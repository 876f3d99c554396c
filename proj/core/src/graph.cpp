#include "dpgcn/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace dpgcn {

double CsrMatrix::at(int r, int c) const {
  for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
    if (col_idx[k] == c) return values[k];
  }
  return 0.0;
}

Matrix CsrMatrix::to_dense() const {
  Matrix d = Matrix::Zero(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      d(r, col_idx[k]) += values[k];
    }
  }
  return d;
}

CsrMatrix CsrMatrix::transposed() const {
  std::vector<std::tuple<int, int, double>> triplets;
  triplets.reserve(col_idx.size());
  for (int r = 0; r < rows; ++r) {
    for (std::int64_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
      triplets.emplace_back(col_idx[k], r, values[k]);
    }
  }
  return from_triplets(cols, rows, std::move(triplets));
}

CsrMatrix CsrMatrix::from_triplets(
    int rows, int cols, std::vector<std::tuple<int, int, double>> triplets) {
  for (const auto& [r, c, v] : triplets) {
    if (r < 0 || r >= rows || c < 0 || c >= cols) {
      throw std::invalid_argument("CsrMatrix::from_triplets: index out of range");
    }
  }
  std::sort(triplets.begin(), triplets.end(),
            [](const auto& a, const auto& b) {
              return std::tie(std::get<0>(a), std::get<1>(a)) <
                     std::tie(std::get<0>(b), std::get<1>(b));
            });
  CsrMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.row_ptr.assign(static_cast<std::size_t>(rows) + 1, 0);
  for (std::size_t i = 0; i < triplets.size();) {
    auto [r, c, v] = triplets[i];
    double sum = v;
    std::size_t j = i + 1;
    while (j < triplets.size() && std::get<0>(triplets[j]) == r &&
           std::get<1>(triplets[j]) == c) {
      sum += std::get<2>(triplets[j]);
      ++j;
    }
    m.col_idx.push_back(c);
    m.values.push_back(sum);
    m.row_ptr[r + 1] = static_cast<std::int64_t>(m.col_idx.size());
    i = j;
  }
  for (int r = 1; r <= rows; ++r) {
    m.row_ptr[r] = std::max(m.row_ptr[r], m.row_ptr[r - 1]);
  }
  return m;
}

Matrix spmm(const CsrMatrix& a, const Matrix& x, MessageCounter* counter) {
  if (a.cols != x.rows()) {
    throw std::invalid_argument("spmm: inner dimensions disagree (" +
                                std::to_string(a.cols) + " vs " +
                                std::to_string(x.rows()) + ")");
  }
  Matrix out = Matrix::Zero(a.rows, x.cols());
  for (int r = 0; r < a.rows; ++r) {
    for (std::int64_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      out.row(r) += a.values[k] * x.row(a.col_idx[k]);
    }
  }
  if (counter != nullptr) counter->messages += a.nnz();
  return out;
}

Graph::Graph(const std::vector<std::pair<int, int>>& edge_list, int num_nodes)
    : num_nodes_(num_nodes) {
  if (num_nodes <= 0) {
    throw std::invalid_argument("Graph: num_nodes must be positive");
  }
  std::set<std::pair<int, int>> canonical;
  std::int64_t collapsed = 0;
  for (const auto& [u, v] : edge_list) {
    if (u < 0 || u >= num_nodes || v < 0 || v >= num_nodes) {
      throw std::invalid_argument("Graph: node id out of range: (" +
                                  std::to_string(u) + ", " + std::to_string(v) +
                                  ") with num_nodes=" + std::to_string(num_nodes));
    }
    if (u == v) continue;  // self-contribution enters via +I only
    auto e = std::minmax(u, v);
    if (!canonical.insert({e.first, e.second}).second) ++collapsed;
  }
  if (collapsed > 0) {
    std::cerr << "[dpgcn] note: " << collapsed
              << " duplicate/reverse edge entries collapsed to undirected edges\n";
  }
  edges_.assign(canonical.begin(), canonical.end());

  degrees_.assign(num_nodes, 0);
  std::vector<std::tuple<int, int, double>> triplets;
  triplets.reserve(edges_.size() * 2);
  for (const auto& [u, v] : edges_) {
    triplets.emplace_back(u, v, 1.0);
    triplets.emplace_back(v, u, 1.0);
    ++degrees_[u];
    ++degrees_[v];
  }
  adjacency_ = CsrMatrix::from_triplets(num_nodes, num_nodes, std::move(triplets));
}

std::vector<int> Graph::neighbors(int v) const {
  std::vector<int> out;
  for (std::int64_t k = adjacency_.row_ptr[v]; k < adjacency_.row_ptr[v + 1]; ++k) {
    out.push_back(adjacency_.col_idx[k]);
  }
  return out;
}

int Graph::num_classes() const {
  int c = 0;
  for (int y : labels_) c = std::max(c, y + 1);
  return c;
}

Graph Graph::with_labels(std::vector<int> labels, std::vector<NodeMask> mask) const {
  if (static_cast<int>(labels.size()) != num_nodes_) {
    throw std::invalid_argument("with_labels: label count must equal node count");
  }
  Graph g = *this;
  g.labels_ = std::move(labels);
  if (mask.empty()) {
    g.label_mask_.assign(num_nodes_, NodeMask::Unlabeled);
  } else {
    if (static_cast<int>(mask.size()) != num_nodes_) {
      throw std::invalid_argument("with_labels: mask size must equal node count");
    }
    g.label_mask_ = std::move(mask);
  }
  return g;
}

Graph build_graph(const std::vector<std::pair<int, int>>& edge_list, int num_nodes) {
  return Graph(edge_list, num_nodes);
}

NormalizedAdjacency normalize_adjacency(const Graph& g) {
  const int n = g.num_nodes();
  NormalizedAdjacency out;
  out.source_degrees.resize(n);
  for (int i = 0; i < n; ++i) out.source_degrees[i] = g.degree(i) + 1;

  std::vector<std::tuple<int, int, double>> triplets;
  triplets.reserve(g.num_edges() * 2 + n);
  auto entry = [&](int i, int j) {
    return 1.0 / std::sqrt(static_cast<double>(out.source_degrees[i]) *
                           static_cast<double>(out.source_degrees[j]));
  };
  for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, entry(i, i));
  for (const auto& [u, v] : g.edges()) {
    triplets.emplace_back(u, v, entry(u, v));
    triplets.emplace_back(v, u, entry(v, u));
  }
  out.matrix = CsrMatrix::from_triplets(n, n, std::move(triplets));
  return out;
}

Matrix spmm(const NormalizedAdjacency& adj, const Matrix& x, MessageCounter* counter) {
  return spmm(adj.matrix, x, counter);
}

namespace {

std::vector<std::pair<int, int>> read_pair_file(const std::string& path,
                                                const char* what) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error(std::string(what) + ": cannot open " + path);
  }
  std::vector<std::pair<int, int>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    auto hash = sv.find('#');
    if (hash != std::string_view::npos) sv = sv.substr(0, hash);
    std::string trimmed(sv);
    std::istringstream ss(trimmed);
    long a, b;
    if (!(ss >> a)) continue;  // blank or comment-only line
    std::string rest;
    if (!(ss >> b) || (ss >> rest)) {
      throw std::runtime_error(std::string(what) + ": malformed line " +
                               std::to_string(line_no) + " in " + path + ": '" +
                               line + "'");
    }
    out.emplace_back(static_cast<int>(a), static_cast<int>(b));
  }
  return out;
}

}  // namespace

std::vector<std::pair<int, int>> read_edge_list(const std::string& path) {
  return read_pair_file(path, "read_edge_list");
}

std::vector<std::pair<int, int>> read_label_file(const std::string& path) {
  return read_pair_file(path, "read_label_file");
}

}  // namespace dpgcn
