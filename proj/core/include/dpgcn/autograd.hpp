#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "dpgcn/graph.hpp"
#include "dpgcn/tensor.hpp"

namespace dpgcn {

/// Sequential record of executed ops. Each forward call appends one backward
/// record; backward() replays them in exact reverse execution order, then
/// marks the tape consumed. Build a fresh tape per forward pass.
///
/// Every op validates shapes, records only when a gradient path exists, and
/// rejects non-finite outputs (NonFiniteError) so divergence surfaces at the
/// op that produced it.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  TensorPtr matmul(const TensorPtr& a, const TensorPtr& b);
  /// Sparse-constant times dense. `mt` must be the transpose of `m` (used for
  /// the backward product). Forward messages are counted into `counter`.
  TensorPtr spmm(const CsrMatrix& m, const CsrMatrix& mt, const TensorPtr& x,
                 MessageCounter* counter = nullptr);
  TensorPtr add(const TensorPtr& a, const TensorPtr& b);
  TensorPtr scale(const TensorPtr& a, double s);
  TensorPtr concat_cols(const TensorPtr& a, const TensorPtr& b);
  /// out.row(i) = s(i) * x.row(i); s is a column vector.
  TensorPtr row_scale(const TensorPtr& x, const TensorPtr& s);

  TensorPtr relu(const TensorPtr& a);
  TensorPtr leaky_relu(const TensorPtr& a, double negative_slope);
  TensorPtr elu(const TensorPtr& a);

  TensorPtr log_softmax_rows(const TensorPtr& a);
  /// Rows scaled to unit L2 norm. Exactly-zero rows stay zero and pass no
  /// gradient (warned once per tape).
  TensorPtr l2_normalize_rows(const TensorPtr& a);

  /// Pairwise softmax over two score columns; returns (a_c, a_t) with
  /// a_c + a_t = 1 elementwise. Stabilized, never overflows.
  std::pair<TensorPtr, TensorPtr> softmax_pair(const TensorPtr& e_c,
                                               const TensorPtr& e_t);

  /// Weighted mean of -log_probs[i][labels[i]] over nodes with weight > 0.
  /// Throws std::invalid_argument when no node has positive weight.
  TensorPtr nll_loss(const TensorPtr& log_probs, const std::vector<int>& labels,
                     const std::vector<double>& weights);

  TensorPtr sum(const TensorPtr& a);

  /// Seeds d(loss)/d(loss) = 1 and replays records in reverse. The loss must
  /// be a 1x1 tensor on a live gradient path; calling twice throws.
  void backward(const TensorPtr& loss);

  std::size_t num_records() const { return records_.size(); }
  bool consumed() const { return consumed_; }

 private:
  TensorPtr output(Matrix value, bool requires_grad, const char* op);
  void record(std::function<void()> fn) { records_.push_back(std::move(fn)); }

  std::vector<std::function<void()>> records_;
  bool consumed_ = false;
  bool warned_zero_row_ = false;
};

struct NonFiniteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dpgcn
