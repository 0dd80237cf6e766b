// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nodemoe/graph.hpp"
#include "nodemoe/matrix.hpp"

namespace nodemoe::ad {

// Optimizer group of a parameter.
enum class ParamTag { filter_coeff, network_weight };

struct Param {
  Param() = default;
  Param(std::string name, Matrix value, ParamTag tag)
      : name(std::move(name)), value(std::move(value)), grad(this->value.rows(), this->value.cols()),
        tag(tag) {}

  std::string name;
  Matrix value;
  Matrix grad;
  ParamTag tag = ParamTag::network_weight;

  void zero_grad() { grad = Matrix(value.rows(), value.cols()); }
};

class Tape;

// Handle to a recorded value. Valid only while its tape is alive.
struct Var {
  Tape* tape = nullptr;
  std::size_t id = 0;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

// Records a full-batch computation for one training step. Nodes are appended
// in evaluation order, so the recording is topologically sorted by
// construction and backward() is a single reverse sweep.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, std::size_t self)>;

  Var constant(Matrix value);
  // Gradients reaching this leaf are accumulated into p.grad by backward().
  // p must outlive the tape.
  Var param(Param& p);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  const Matrix& value(std::size_t id) const { return nodes_[id].value; }
  // Adjoint of a node after backward(); zero-sized if nothing flowed into it.
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 and propagates. Throws if the loss is not 1 x 1
  // or if called twice on the same tape.
  void backward(Var loss);

  // Primitive plumbing.
  Var record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn);
  Var record(Matrix value, std::span<const Var> inputs, BackwardFn fn);
  // Adjoint accumulator of node `id`, zero-initialized on first access.
  Matrix& grad_buffer(std::size_t id);
  const Matrix& grad_of(std::size_t id) const { return nodes_[id].grad; }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool requires_grad = false;
    Param* param = nullptr;
    BackwardFn backward;
  };

  std::vector<Node> nodes_;
  bool backward_done_ = false;
};

Var matmul(Var a, Var b);
// op(x); the operator must outlive the tape. Backward applies the transpose.
Var sparse_apply(const NormalizedOperator& op, Var x);
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var scale(Var a, double s);
// x (n x c) + b (1 x c) broadcast over rows.
Var add_row_bias(Var x, Var b);
Var relu(Var x);
// Subgradient 0 at 0.
Var abs(Var x);
Var mul(Var a, Var b);
// Elementwise product with a constant matrix (dropout masks).
Var mul_constant(Var a, const Matrix& c);
Var row_softmax(Var x);
// Softmax over the k largest entries of each row, zeros elsewhere. Ties keep
// the lower column index. Gradient flows only through surviving entries.
Var topk_row_softmax(Var x, std::size_t k);
// Mean over `mask` rows of -log softmax(logits)[label].
Var log_softmax_cross_entropy(Var logits, std::span<const int> labels,
                              std::span<const std::size_t> mask);
Var reduce_sum(Var x);
Var concat_columns(std::span<const Var> blocks);
// sum_k coeffs[k] * blocks[k] for a (K+1) x 1 coefficient column.
Var linear_combination(Var coeffs, std::span<const Var> blocks);
// Column j as an n x 1 matrix.
Var column(Var x, std::size_t j);
// Row i of x scaled by w[i] (w is n x 1).
Var scale_rows(Var x, Var w);
// 1 x c row of column sums.
Var column_sums(Var x);
// Per-column (x - mean) / sqrt(var + eps), eps > 0, with the biased full-batch
// variance; batch normalization without the affine part.
Var standardize_columns(Var x, double eps = 1e-5);
// Squared coefficient of variation of a 1 x m row: var / (mean^2 + 1e-10),
// with the unbiased (m - 1) variance; 0 when m == 1.
Var cv_squared(Var row);

}  // namespace nodemoe::ad
