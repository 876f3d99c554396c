#pragma once

#include <memory>
#include <random>
#include <string>

#include "dpgcn/graph.hpp"

namespace dpgcn {

/// Dense float64 value with an optional gradient buffer. Tensors are shared
/// between the tape records that produced and consume them.
struct Tensor {
  Matrix value;
  Matrix grad;  // empty until first needed, then zero-initialized
  bool requires_grad = false;
  std::string name;

  Tensor() = default;
  Tensor(Matrix v, bool rg, std::string n = "")
      : value(std::move(v)), requires_grad(rg), name(std::move(n)) {}

  Eigen::Index rows() const { return value.rows(); }
  Eigen::Index cols() const { return value.cols(); }

  Matrix& grad_ref() {
    if (grad.size() == 0) grad = Matrix::Zero(value.rows(), value.cols());
    return grad;
  }
  void zero_grad() {
    if (grad.size() != 0) grad.setZero();
  }
};

using TensorPtr = std::shared_ptr<Tensor>;

/// Trainable parameter (participates in backward and optimizer steps).
TensorPtr make_param(Matrix value, std::string name = "");
/// Constant input; no gradient flows into it.
TensorPtr make_const(Matrix value, std::string name = "");

/// Glorot-uniform sample in U(-s, s), s = sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(int rows, int cols, std::mt19937_64& rng);

bool all_finite(const Matrix& m);

}  // namespace dpgcn
