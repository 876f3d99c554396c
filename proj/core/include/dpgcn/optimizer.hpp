#pragma once

#include <cstdint>
#include <vector>

#include "dpgcn/tensor.hpp"

namespace dpgcn {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 5e-4;  // L2 added to the gradient before the moments
};

/// Standard Adam with bias correction. step() consumes and clears gradients.
class Adam {
 public:
  Adam(std::vector<TensorPtr> params, AdamConfig config);

  void step();
  void zero_grad();
  std::int64_t step_count() const { return t_; }
  const AdamConfig& config() const { return config_; }

 private:
  std::vector<TensorPtr> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  AdamConfig config_;
  std::int64_t t_ = 0;
};

}  // namespace dpgcn
