#include "dpgcn/kmeans.hpp"

#include <algorithm>
#include <iostream>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace dpgcn {

namespace {

double sq_dist(const Matrix& pts, int i, const Matrix& centroids, int c) {
  return (pts.row(i) - centroids.row(c)).squaredNorm();
}

int count_distinct_rows(const Matrix& pts) {
  const int n = static_cast<int>(pts.rows());
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  auto row_less = [&](int a, int b) {
    for (Eigen::Index j = 0; j < pts.cols(); ++j) {
      if (pts(a, j) != pts(b, j)) return pts(a, j) < pts(b, j);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  int distinct = n > 0 ? 1 : 0;
  for (int i = 1; i < n; ++i) {
    if (row_less(order[i - 1], order[i])) ++distinct;
  }
  return distinct;
}

struct SingleRun {
  std::vector<int> assignment;
  Matrix centroids;
  double inertia = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

SingleRun run_lloyd(const Matrix& pts, int k, std::mt19937_64& rng,
                    int max_iters, double tol) {
  const int n = static_cast<int>(pts.rows());
  const auto dim = pts.cols();

  // k-means++ seeding
  Matrix centroids(k, dim);
  std::uniform_int_distribution<int> first(0, n - 1);
  centroids.row(0) = pts.row(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (int j = 0; j < c; ++j) best = std::min(best, sq_dist(pts, i, centroids, j));
      d2[static_cast<std::size_t>(i)] = best;
      total += best;
    }
    int pick = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double r = u(rng);
      double acc = 0.0;
      pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2[static_cast<std::size_t>(i)];
        if (r <= acc) {
          pick = i;
          break;
        }
      }
    } else {
      pick = first(rng);  // all points coincide with chosen centroids
    }
    centroids.row(c) = pts.row(pick);
  }

  SingleRun run;
  run.assignment.assign(static_cast<std::size_t>(n), 0);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  Matrix sums(k, dim);
  for (int iter = 1; iter <= max_iters; ++iter) {
    run.iterations = iter;
    // assignment step: ties break to the lowest cluster index
    for (int i = 0; i < n; ++i) {
      double best = sq_dist(pts, i, centroids, 0);
      int arg = 0;
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(pts, i, centroids, c);
        if (d < best) {
          best = d;
          arg = c;
        }
      }
      run.assignment[static_cast<std::size_t>(i)] = arg;
    }
    // update step
    sums.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (int i = 0; i < n; ++i) {
      const int c = run.assignment[static_cast<std::size_t>(i)];
      sums.row(c) += pts.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    double shift = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) {
        // re-seed to the point farthest from its assigned centroid
        double worst = -1.0;
        int pick = 0;
        for (int i = 0; i < n; ++i) {
          const double d =
              sq_dist(pts, i, centroids, run.assignment[static_cast<std::size_t>(i)]);
          if (d > worst) {
            worst = d;
            pick = i;
          }
        }
        shift = std::max(shift, (centroids.row(c) - pts.row(pick)).norm());
        centroids.row(c) = pts.row(pick);
        run.assignment[static_cast<std::size_t>(pick)] = c;
        continue;
      }
      const Matrix updated =
          sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      shift = std::max(shift, (centroids.row(c) - updated).norm());
      centroids.row(c) = updated;
    }
    if (shift < tol) break;
  }

  // final assignment against converged centroids + inertia
  run.inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    double best = sq_dist(pts, i, centroids, 0);
    int arg = 0;
    for (int c = 1; c < k; ++c) {
      const double d = sq_dist(pts, i, centroids, c);
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    run.assignment[static_cast<std::size_t>(i)] = arg;
    run.inertia += best;
  }
  run.centroids = std::move(centroids);
  return run;
}

}  // namespace

KMeansResult kmeans(const Matrix& points, const KMeansConfig& config) {
  const int n = static_cast<int>(points.rows());
  if (n == 0) throw std::invalid_argument("kmeans: no points");
  if (config.k < 1) throw std::invalid_argument("kmeans: k must be >= 1");

  const int distinct = count_distinct_rows(points);
  int k = std::min(config.k, distinct);
  KMeansResult result;
  result.clamped = k != config.k;
  if (result.clamped) {
    std::cerr << "[dpgcn] kmeans: k clamped from " << config.k << " to " << k
              << " (distinct feature rows)\n";
  }

  std::mt19937_64 rng(config.seed);
  SingleRun best;
  const int restarts = std::max(1, config.restarts);
  for (int r = 0; r < restarts; ++r) {
    SingleRun run = run_lloyd(points, k, rng, config.max_iters, config.tol);
    if (run.inertia < best.inertia) best = std::move(run);
  }

  // compact away empty clusters (possible when k-means++ picks duplicates)
  std::vector<int> remap(static_cast<std::size_t>(k), -1);
  int next_id = 0;
  for (int i = 0; i < n; ++i) {
    int& slot = remap[static_cast<std::size_t>(best.assignment[static_cast<std::size_t>(i)])];
    if (slot == -1) slot = next_id++;
  }
  result.effective_k = next_id;
  result.assignment.resize(static_cast<std::size_t>(n));
  result.centroids = Matrix::Zero(next_id, points.cols());
  for (int c = 0; c < k; ++c) {
    if (remap[static_cast<std::size_t>(c)] != -1) {
      result.centroids.row(remap[static_cast<std::size_t>(c)]) = best.centroids.row(c);
    }
  }
  for (int i = 0; i < n; ++i) {
    result.assignment[static_cast<std::size_t>(i)] =
        remap[static_cast<std::size_t>(best.assignment[static_cast<std::size_t>(i)])];
  }
  result.inertia = best.inertia;
  result.iterations = best.iterations;
  return result;
}

}  // namespace dpgcn
