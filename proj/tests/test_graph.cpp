#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>

#include "dpgcn/graph.hpp"
#include "support/test_util.hpp"

using namespace dpgcn;

TEST_CASE("build_graph deduplicates and symmetrizes") {
  const Graph g = build_graph({{0, 1}, {1, 0}, {1, 2}}, 3);
  CHECK(g.num_nodes() == 3);
  CHECK(g.num_edges() == 2);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.degree(2) == 1);
  CHECK(g.adjacency().at(0, 1) == 1.0);
  CHECK(g.adjacency().at(1, 0) == 1.0);
  CHECK(g.adjacency().at(0, 2) == 0.0);
  CHECK(g.adjacency().at(0, 0) == 0.0);  // no self-loops
}

TEST_CASE("build_graph permits isolated nodes") {
  const Graph g = build_graph({}, 4);
  CHECK(g.num_nodes() == 4);
  CHECK(g.num_edges() == 0);
  for (int i = 0; i < 4; ++i) CHECK(g.degree(i) == 0);
}

TEST_CASE("build_graph rejects bad input") {
  CHECK_THROWS_AS(build_graph({{0, 3}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_graph({{0, -1}}, 3), std::invalid_argument);
  CHECK_THROWS_AS(build_graph({}, 0), std::invalid_argument);
}

TEST_CASE("normalize_adjacency on K3 gives exactly 1/3 everywhere") {
  const Graph k3 = build_graph({{0, 1}, {1, 2}, {0, 2}}, 3);
  const NormalizedAdjacency adj = normalize_adjacency(k3);
  const Matrix dense = adj.matrix.to_dense();
  for (int i = 0; i < 3; ++i) {
    CHECK(adj.source_degrees[i] == 3);
    for (int j = 0; j < 3; ++j) {
      CHECK(dense(i, j) == 1.0 / 3.0);  // sqrt(9) is exact
    }
  }
}

TEST_CASE("normalize_adjacency on a single edge") {
  const Graph path = build_graph({{0, 1}}, 2);
  const Matrix dense = normalize_adjacency(path).matrix.to_dense();
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) CHECK(dense(i, j) == 0.5);
  }
}

TEST_CASE("normalize_adjacency on an isolated node") {
  const Graph one = build_graph({}, 1);
  const NormalizedAdjacency adj = normalize_adjacency(one);
  CHECK(adj.matrix.rows == 1);
  CHECK(adj.matrix.at(0, 0) == 1.0);
}

TEST_CASE("normalized adjacency is exactly symmetric with exact diagonal") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const Graph g = testutil::random_graph(30, 0.15, rng);
    const NormalizedAdjacency adj = normalize_adjacency(g);
    const Matrix dense = adj.matrix.to_dense();
    CHECK((dense - dense.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < g.num_nodes(); ++i) {
      CHECK(dense(i, i) == 1.0 / (g.degree(i) + 1));
    }
    // nonzero exactly on the diagonal and edges
    for (int i = 0; i < g.num_nodes(); ++i) {
      for (int j = 0; j < g.num_nodes(); ++j) {
        const bool expected = i == j || g.adjacency().at(i, j) != 0.0;
        CHECK((dense(i, j) != 0.0) == expected);
      }
    }
  }
}

TEST_CASE("spmm identity and K3 row sums") {
  std::mt19937_64 rng(3);
  std::vector<std::tuple<int, int, double>> eye;
  for (int i = 0; i < 5; ++i) eye.emplace_back(i, i, 1.0);
  const CsrMatrix identity = CsrMatrix::from_triplets(5, 5, eye);
  const Matrix x = testutil::random_matrix(5, 3, rng);
  CHECK((spmm(identity, x) - x).cwiseAbs().maxCoeff() == 0.0);

  const Graph k3 = build_graph({{0, 1}, {1, 2}, {0, 2}}, 3);
  const Matrix ones = Matrix::Ones(3, 1);
  const Matrix row_sums = spmm(normalize_adjacency(k3), ones);
  for (int i = 0; i < 3; ++i) CHECK(row_sums(i, 0) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("spmm matches dense reference on random graphs up to 50 nodes") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const int n = 5 + static_cast<int>(rng() % 46);
    const Graph g = testutil::random_graph(n, 0.2, rng);
    const NormalizedAdjacency adj = normalize_adjacency(g);
    const Matrix x = testutil::random_matrix(n, 4, rng);
    const Matrix expected = adj.matrix.to_dense() * x;
    const Matrix got = spmm(adj, x);
    CHECK((expected - got).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("spmm random sparse against dense product") {
  std::mt19937_64 rng(23);
  std::vector<std::tuple<int, int, double>> triplets;
  std::uniform_real_distribution<double> val(-2.0, 2.0);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      if (rng() % 2 == 0) triplets.emplace_back(r, c, val(rng));
    }
  }
  const CsrMatrix a = CsrMatrix::from_triplets(5, 5, triplets);
  const Matrix x = testutil::random_matrix(5, 3, rng);
  CHECK((spmm(a, x) - a.to_dense() * x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spmm rejects dimension mismatch and counts messages") {
  const Graph k3 = build_graph({{0, 1}, {1, 2}, {0, 2}}, 3);
  const NormalizedAdjacency adj = normalize_adjacency(k3);
  CHECK_THROWS_AS(spmm(adj, Matrix::Ones(4, 1)), std::invalid_argument);
  MessageCounter counter;
  spmm(adj, Matrix::Ones(3, 2), &counter);
  CHECK(counter.messages == adj.matrix.nnz());
}

TEST_CASE("CsrMatrix transpose round-trips") {
  std::mt19937_64 rng(5);
  std::vector<std::tuple<int, int, double>> triplets;
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  for (int i = 0; i < 12; ++i) {
    triplets.emplace_back(static_cast<int>(rng() % 4), static_cast<int>(rng() % 6),
                          val(rng));
  }
  const CsrMatrix a = CsrMatrix::from_triplets(4, 6, triplets);
  const CsrMatrix at = a.transposed();
  CHECK((at.to_dense() - a.to_dense().transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK((at.transposed().to_dense() - a.to_dense()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("edge list parser handles comments and reports bad lines") {
  const std::string path = "test_edges_tmp.txt";
  {
    std::ofstream out(path);
    out << "# airline sample\n0 1\n1 2\n\n2 0 # inline comment\n";
  }
  const auto edges = read_edge_list(path);
  CHECK(edges.size() == 3);
  {
    std::ofstream out(path);
    out << "0 1\n1 two\n";
  }
  CHECK_THROWS_WITH_AS(static_cast<void>(read_edge_list(path)),
                       doctest::Contains("line 2"), std::runtime_error);
  std::remove(path.c_str());
}
