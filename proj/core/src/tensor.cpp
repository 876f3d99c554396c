#include "dpgcn/tensor.hpp"

#include <cmath>

namespace dpgcn {

TensorPtr make_param(Matrix value, std::string name) {
  return std::make_shared<Tensor>(std::move(value), true, std::move(name));
}

TensorPtr make_const(Matrix value, std::string name) {
  return std::make_shared<Tensor>(std::move(value), false, std::move(name));
}

Matrix glorot_uniform(int rows, int cols, std::mt19937_64& rng) {
  const double s = std::sqrt(6.0 / static_cast<double>(rows + cols));
  std::uniform_real_distribution<double> dist(-s, s);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = dist(rng);
  }
  return m;
}

bool all_finite(const Matrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (!std::isfinite(m.data()[i])) return false;
  }
  return true;
}

}  // namespace dpgcn
