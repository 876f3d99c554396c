#include "dpgcn/autograd.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace dpgcn {

namespace {

void check_same_shape(const TensorPtr& a, const TensorPtr& b, const char* op) {
  if (a->rows() != b->rows() || a->cols() != b->cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch (" +
                                std::to_string(a->rows()) + "x" +
                                std::to_string(a->cols()) + " vs " +
                                std::to_string(b->rows()) + "x" +
                                std::to_string(b->cols()) + ")");
  }
}

double stable_sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double t = std::exp(z);
  return t / (1.0 + t);
}

}  // namespace

TensorPtr Tape::output(Matrix value, bool requires_grad, const char* op) {
  if (!all_finite(value)) {
    throw NonFiniteError(std::string(op) + ": non-finite value in output");
  }
  return std::make_shared<Tensor>(std::move(value), requires_grad);
}

TensorPtr Tape::matmul(const TensorPtr& a, const TensorPtr& b) {
  if (a->cols() != b->rows()) {
    throw std::invalid_argument("matmul: inner dimensions disagree (" +
                                std::to_string(a->cols()) + " vs " +
                                std::to_string(b->rows()) + ")");
  }
  auto out = output(a->value * b->value, a->requires_grad || b->requires_grad,
                    "matmul");
  if (out->requires_grad) {
    record([a, b, out] {
      if (a->requires_grad) a->grad_ref() += out->grad * b->value.transpose();
      if (b->requires_grad) b->grad_ref() += a->value.transpose() * out->grad;
    });
  }
  return out;
}

TensorPtr Tape::spmm(const CsrMatrix& m, const CsrMatrix& mt, const TensorPtr& x,
                     MessageCounter* counter) {
  if (mt.rows != m.cols || mt.cols != m.rows) {
    throw std::invalid_argument("spmm: mt is not the transpose of m");
  }
  auto out = output(dpgcn::spmm(m, x->value, counter), x->requires_grad, "spmm");
  if (out->requires_grad) {
    record([mt, x, out] { x->grad_ref() += dpgcn::spmm(mt, out->grad); });
  }
  return out;
}

TensorPtr Tape::add(const TensorPtr& a, const TensorPtr& b) {
  check_same_shape(a, b, "add");
  auto out = output(a->value + b->value, a->requires_grad || b->requires_grad,
                    "add");
  if (out->requires_grad) {
    record([a, b, out] {
      if (a->requires_grad) a->grad_ref() += out->grad;
      if (b->requires_grad) b->grad_ref() += out->grad;
    });
  }
  return out;
}

TensorPtr Tape::scale(const TensorPtr& a, double s) {
  auto out = output(a->value * s, a->requires_grad, "scale");
  if (out->requires_grad) {
    record([a, out, s] { a->grad_ref() += s * out->grad; });
  }
  return out;
}

TensorPtr Tape::concat_cols(const TensorPtr& a, const TensorPtr& b) {
  if (a->rows() != b->rows()) {
    throw std::invalid_argument("concat_cols: row counts differ");
  }
  Matrix v(a->rows(), a->cols() + b->cols());
  v.leftCols(a->cols()) = a->value;
  v.rightCols(b->cols()) = b->value;
  auto out = output(std::move(v), a->requires_grad || b->requires_grad,
                    "concat_cols");
  if (out->requires_grad) {
    record([a, b, out] {
      if (a->requires_grad) a->grad_ref() += out->grad.leftCols(a->cols());
      if (b->requires_grad) b->grad_ref() += out->grad.rightCols(b->cols());
    });
  }
  return out;
}

TensorPtr Tape::row_scale(const TensorPtr& x, const TensorPtr& s) {
  if (s->cols() != 1 || s->rows() != x->rows()) {
    throw std::invalid_argument("row_scale: scale must be a column vector with "
                                "one entry per row of x");
  }
  Matrix v = x->value;
  for (Eigen::Index i = 0; i < v.rows(); ++i) v.row(i) *= s->value(i, 0);
  auto out = output(std::move(v), x->requires_grad || s->requires_grad,
                    "row_scale");
  if (out->requires_grad) {
    record([x, s, out] {
      if (x->requires_grad) {
        Matrix& gx = x->grad_ref();
        for (Eigen::Index i = 0; i < gx.rows(); ++i) {
          gx.row(i) += s->value(i, 0) * out->grad.row(i);
        }
      }
      if (s->requires_grad) {
        Matrix& gs = s->grad_ref();
        for (Eigen::Index i = 0; i < gs.rows(); ++i) {
          gs(i, 0) += out->grad.row(i).dot(x->value.row(i));
        }
      }
    });
  }
  return out;
}

TensorPtr Tape::relu(const TensorPtr& a) {
  auto out = output(a->value.cwiseMax(0.0), a->requires_grad, "relu");
  if (out->requires_grad) {
    record([a, out] {
      Matrix& g = a->grad_ref();
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        if (a->value.data()[i] > 0.0) g.data()[i] += out->grad.data()[i];
      }
    });
  }
  return out;
}

TensorPtr Tape::leaky_relu(const TensorPtr& a, double negative_slope) {
  Matrix v = a->value;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v.data()[i] < 0.0) v.data()[i] *= negative_slope;
  }
  auto out = output(std::move(v), a->requires_grad, "leaky_relu");
  if (out->requires_grad) {
    record([a, out, negative_slope] {
      Matrix& g = a->grad_ref();
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double d = a->value.data()[i] > 0.0 ? 1.0 : negative_slope;
        g.data()[i] += d * out->grad.data()[i];
      }
    });
  }
  return out;
}

TensorPtr Tape::elu(const TensorPtr& a) {
  Matrix v = a->value;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (v.data()[i] < 0.0) v.data()[i] = std::expm1(v.data()[i]);
  }
  auto out = output(std::move(v), a->requires_grad, "elu");
  if (out->requires_grad) {
    record([a, out] {
      Matrix& g = a->grad_ref();
      for (Eigen::Index i = 0; i < g.size(); ++i) {
        const double d =
            a->value.data()[i] > 0.0 ? 1.0 : out->value.data()[i] + 1.0;
        g.data()[i] += d * out->grad.data()[i];
      }
    });
  }
  return out;
}

TensorPtr Tape::log_softmax_rows(const TensorPtr& a) {
  Matrix v(a->rows(), a->cols());
  for (Eigen::Index i = 0; i < a->rows(); ++i) {
    const double mx = a->value.row(i).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index j = 0; j < a->cols(); ++j) {
      sum += std::exp(a->value(i, j) - mx);
    }
    const double lse = mx + std::log(sum);
    for (Eigen::Index j = 0; j < a->cols(); ++j) {
      v(i, j) = a->value(i, j) - lse;
    }
  }
  auto out = output(std::move(v), a->requires_grad, "log_softmax_rows");
  if (out->requires_grad) {
    record([a, out] {
      Matrix& g = a->grad_ref();
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        const double gsum = out->grad.row(i).sum();
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
          g(i, j) += out->grad(i, j) - std::exp(out->value(i, j)) * gsum;
        }
      }
    });
  }
  return out;
}

TensorPtr Tape::l2_normalize_rows(const TensorPtr& a) {
  Matrix v(a->rows(), a->cols());
  std::vector<double> norms(static_cast<std::size_t>(a->rows()));
  for (Eigen::Index i = 0; i < a->rows(); ++i) {
    const double n = a->value.row(i).norm();
    norms[static_cast<std::size_t>(i)] = n;
    if (n == 0.0) {
      v.row(i).setZero();
      if (!warned_zero_row_) {
        std::cerr << "[dpgcn] l2_normalize_rows: zero row left as-is (row "
                  << i << ")\n";
        warned_zero_row_ = true;
      }
    } else {
      v.row(i) = a->value.row(i) / n;
    }
  }
  auto out = output(std::move(v), a->requires_grad, "l2_normalize_rows");
  if (out->requires_grad) {
    record([a, out, norms = std::move(norms)] {
      Matrix& g = a->grad_ref();
      for (Eigen::Index i = 0; i < g.rows(); ++i) {
        const double n = norms[static_cast<std::size_t>(i)];
        if (n == 0.0) continue;  // zero row: zero gradient by contract
        const double dot = out->value.row(i).dot(out->grad.row(i));
        g.row(i) += (out->grad.row(i) - dot * out->value.row(i)) / n;
      }
    });
  }
  return out;
}

std::pair<TensorPtr, TensorPtr> Tape::softmax_pair(const TensorPtr& e_c,
                                                   const TensorPtr& e_t) {
  check_same_shape(e_c, e_t, "softmax_pair");
  if (e_c->cols() != 1) {
    throw std::invalid_argument("softmax_pair: expects n x 1 score columns");
  }
  Matrix ac(e_c->rows(), 1);
  for (Eigen::Index i = 0; i < e_c->rows(); ++i) {
    ac(i, 0) = stable_sigmoid(e_c->value(i, 0) - e_t->value(i, 0));
  }
  const bool rg = e_c->requires_grad || e_t->requires_grad;
  auto a_c = output(ac, rg, "softmax_pair");
  auto a_t = output(Matrix::Ones(e_c->rows(), 1) - a_c->value, rg, "softmax_pair");
  if (rg) {
    record([e_c, e_t, a_c, a_t] {
      for (Eigen::Index i = 0; i < a_c->rows(); ++i) {
        const double s = a_c->value(i, 0) * a_t->value(i, 0);
        const double gc = a_c->grad.size() != 0 ? a_c->grad(i, 0) : 0.0;
        const double gt = a_t->grad.size() != 0 ? a_t->grad(i, 0) : 0.0;
        const double d = (gc - gt) * s;
        if (e_c->requires_grad) e_c->grad_ref()(i, 0) += d;
        if (e_t->requires_grad) e_t->grad_ref()(i, 0) -= d;
      }
    });
  }
  return {a_c, a_t};
}

TensorPtr Tape::nll_loss(const TensorPtr& log_probs, const std::vector<int>& labels,
                         const std::vector<double>& weights) {
  const auto n = static_cast<std::size_t>(log_probs->rows());
  if (labels.size() != n || weights.size() != n) {
    throw std::invalid_argument("nll_loss: labels/weights must have one entry "
                                "per row of log_probs");
  }
  double wsum = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] <= 0.0) continue;
    const int y = labels[i];
    if (y < 0 || y >= log_probs->cols()) {
      throw std::invalid_argument("nll_loss: label " + std::to_string(y) +
                                  " out of range at node " + std::to_string(i));
    }
    wsum += weights[i];
    acc -= weights[i] * log_probs->value(static_cast<Eigen::Index>(i), y);
  }
  if (wsum <= 0.0) {
    throw std::invalid_argument("nll_loss: empty mask (no node has positive weight)");
  }
  Matrix v(1, 1);
  v(0, 0) = acc / wsum;
  auto out = output(std::move(v), log_probs->requires_grad, "nll_loss");
  if (out->requires_grad) {
    record([log_probs, out, labels, weights, wsum] {
      const double go = out->grad(0, 0);
      Matrix& g = log_probs->grad_ref();
      for (std::size_t i = 0; i < labels.size(); ++i) {
        if (weights[i] <= 0.0) continue;
        g(static_cast<Eigen::Index>(i), labels[i]) -= go * weights[i] / wsum;
      }
    });
  }
  return out;
}

TensorPtr Tape::sum(const TensorPtr& a) {
  Matrix v(1, 1);
  v(0, 0) = a->value.sum();
  auto out = output(std::move(v), a->requires_grad, "sum");
  if (out->requires_grad) {
    record([a, out] {
      a->grad_ref().array() += out->grad(0, 0);
    });
  }
  return out;
}

void Tape::backward(const TensorPtr& loss) {
  if (consumed_) {
    throw std::runtime_error("Tape::backward: tape already consumed; run a "
                             "fresh forward pass first");
  }
  if (loss->rows() != 1 || loss->cols() != 1) {
    throw std::invalid_argument("Tape::backward: loss must be a scalar (1x1)");
  }
  if (!loss->requires_grad) {
    throw std::invalid_argument("Tape::backward: loss has no gradient path");
  }
  loss->grad_ref()(0, 0) = 1.0;
  for (auto it = records_.rbegin(); it != records_.rend(); ++it) (*it)();
  consumed_ = true;
}

}  // namespace dpgcn
