// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nodemoe/common.hpp"
#include "nodemoe/simd/kernels.hpp"

namespace nodemoe::ad {
namespace {

const simd::KernelTable& kern() { return simd::active(); }

void accumulate(Matrix& dst, const Matrix& src) {
  kern().axpy(1.0, src.data(), dst.data(), src.size());
}

void require_same_shape(Var a, Var b, const char* op) {
  if (!a.value().same_shape(b.value())) {
    throw ValidationError(std::string(op) + ": shape mismatch (" +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                          std::to_string(b.rows()) + "x" + std::to_string(b.cols()) + ")");
  }
}

Tape* tape_of(Var a, Var b) {
  if (a.tape != b.tape) throw ValidationError("operands recorded on different tapes");
  return a.tape;
}

}  // namespace

const Matrix& Var::value() const { return tape->value(*this); }

Var Tape::constant(Matrix value) {
  Node node;
  node.value = std::move(value);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Tape::param(Param& p) {
  Node node;
  node.value = p.value;
  node.requires_grad = true;
  node.param = &p;
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Var Tape::record(Matrix value, std::initializer_list<Var> inputs, BackwardFn fn) {
  return record(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                std::move(fn));
}

Var Tape::record(Matrix value, std::span<const Var> inputs, BackwardFn fn) {
  Node node;
  node.value = std::move(value);
  for (const Var& in : inputs) {
    if (in.tape != this) throw ValidationError("operand recorded on a different tape");
    node.requires_grad = node.requires_grad || nodes_[in.id].requires_grad;
  }
  if (node.requires_grad) node.backward = std::move(fn);
  nodes_.push_back(std::move(node));
  return {this, nodes_.size() - 1};
}

Matrix& Tape::grad_buffer(std::size_t id) {
  Node& node = nodes_[id];
  if (!node.grad.same_shape(node.value) || node.grad.empty()) {
    node.grad = Matrix(node.value.rows(), node.value.cols());
  }
  return node.grad;
}

void Tape::backward(Var loss) {
  if (backward_done_) throw ValidationError("backward called twice on the same tape");
  if (loss.tape != this) throw ValidationError("loss recorded on a different tape");
  const Matrix& lv = nodes_[loss.id].value;
  if (lv.rows() != 1 || lv.cols() != 1) throw ValidationError("backward requires a scalar loss");
  backward_done_ = true;
  grad_buffer(loss.id)(0, 0) = 1.0;
  for (std::size_t id = loss.id + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (!node.requires_grad || node.grad.empty()) continue;
    if (node.backward) node.backward(*this, id);
    if (node.param != nullptr) {
      if (!node.param->grad.same_shape(node.param->value)) node.param->zero_grad();
      accumulate(node.param->grad, node.grad);
    }
  }
}

Var matmul(Var a, Var b) {
  Tape* t = tape_of(a, b);
  if (a.cols() != b.rows()) {
    throw ValidationError("matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                          " vs " + std::to_string(b.rows()) + ")");
  }
  return t->record(nodemoe::matmul(a.value(), b.value()), {a, b},
                   [a = a.id, b = b.id](Tape& tp, std::size_t self) {
                     const Matrix& g = tp.grad_of(self);
                     if (tp.requires_grad(a)) {
                       accumulate(tp.grad_buffer(a), matmul_nt(g, tp.value(b)));
                     }
                     if (tp.requires_grad(b)) {
                       accumulate(tp.grad_buffer(b), matmul_tn(tp.value(a), g));
                     }
                   });
}

Var sparse_apply(const NormalizedOperator& op, Var x) {
  return x.tape->record(op.apply(x.value()), {x},
                        [&op, x = x.id](Tape& tp, std::size_t self) {
                          accumulate(tp.grad_buffer(x), op.apply_transpose(tp.grad_of(self)));
                        });
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Tape* t = tape_of(a, b);
  Matrix out = a.value();
  accumulate(out, b.value());
  return t->record(std::move(out), {a, b}, [a = a.id, b = b.id](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    if (tp.requires_grad(a)) accumulate(tp.grad_buffer(a), g);
    if (tp.requires_grad(b)) accumulate(tp.grad_buffer(b), g);
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Tape* t = tape_of(a, b);
  Matrix out = a.value();
  kern().axpy(-1.0, b.value().data(), out.data(), out.size());
  return t->record(std::move(out), {a, b}, [a = a.id, b = b.id](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    if (tp.requires_grad(a)) accumulate(tp.grad_buffer(a), g);
    if (tp.requires_grad(b)) {
      Matrix& gb = tp.grad_buffer(b);
      kern().axpy(-1.0, g.data(), gb.data(), g.size());
    }
  });
}

Var scale(Var a, double s) {
  Matrix out = a.value();
  kern().scale(s, out.data(), out.size());
  return a.tape->record(std::move(out), {a}, [a = a.id, s](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    Matrix& ga = tp.grad_buffer(a);
    kern().axpy(s, g.data(), ga.data(), g.size());
  });
}

Var add_row_bias(Var x, Var b) {
  Tape* t = tape_of(x, b);
  if (b.rows() != 1 || b.cols() != x.cols()) {
    throw ValidationError("add_row_bias: bias must be 1 x " + std::to_string(x.cols()));
  }
  Matrix out = x.value();
  const double* bias = b.value().data();
  for (std::size_t i = 0; i < out.rows(); ++i) {
    kern().axpy(1.0, bias, out.row(i).data(), out.cols());
  }
  return t->record(std::move(out), {x, b}, [x = x.id, b = b.id](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    if (tp.requires_grad(x)) accumulate(tp.grad_buffer(x), g);
    if (tp.requires_grad(b)) {
      Matrix& gb = tp.grad_buffer(b);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        kern().axpy(1.0, g.row(i).data(), gb.data(), g.cols());
      }
    }
  });
}

Var relu(Var x) {
  Matrix out(x.rows(), x.cols());
  kern().relu(x.value().data(), out.data(), out.size());
  return x.tape->record(std::move(out), {x}, [x = x.id](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    kern().relu_backward(tp.value(x).data(), g.data(), tp.grad_buffer(x).data(), g.size());
  });
}

Var abs(Var x) {
  Matrix out(x.rows(), x.cols());
  kern().abs(x.value().data(), out.data(), out.size());
  return x.tape->record(std::move(out), {x}, [x = x.id](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    kern().abs_backward(tp.value(x).data(), g.data(), tp.grad_buffer(x).data(), g.size());
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Tape* t = tape_of(a, b);
  Matrix out(a.rows(), a.cols());
  kern().mul(a.value().data(), b.value().data(), out.data(), out.size());
  return t->record(std::move(out), {a, b}, [a = a.id, b = b.id](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    Matrix tmp(g.rows(), g.cols());
    if (tp.requires_grad(a)) {
      kern().mul(g.data(), tp.value(b).data(), tmp.data(), g.size());
      accumulate(tp.grad_buffer(a), tmp);
    }
    if (tp.requires_grad(b)) {
      kern().mul(g.data(), tp.value(a).data(), tmp.data(), g.size());
      accumulate(tp.grad_buffer(b), tmp);
    }
  });
}

Var mul_constant(Var a, const Matrix& c) {
  if (!a.value().same_shape(c)) throw ValidationError("mul_constant: shape mismatch");
  Matrix out(a.rows(), a.cols());
  kern().mul(a.value().data(), c.data(), out.data(), out.size());
  return a.tape->record(std::move(out), {a}, [a = a.id, c](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    Matrix tmp(g.rows(), g.cols());
    kern().mul(g.data(), c.data(), tmp.data(), g.size());
    accumulate(tp.grad_buffer(a), tmp);
  });
}

namespace {

// Backward of a (possibly sparse) softmax given its output s:
// dx = s .* (g - <g, s>) per row.
void softmax_backward(const Matrix& s, const Matrix& g, Matrix& gx) {
  for (std::size_t i = 0; i < s.rows(); ++i) {
    const auto si = s.row(i);
    const auto gi = g.row(i);
    auto out = gx.row(i);
    const double inner = kern().dot(si.data(), gi.data(), si.size());
    for (std::size_t j = 0; j < si.size(); ++j) out[j] += si[j] * (gi[j] - inner);
  }
}

}  // namespace

Var row_softmax(Var x) {
  if (x.cols() == 0) throw ValidationError("row_softmax: empty rows");
  const Matrix& v = x.value();
  Matrix out(v.rows(), v.cols());
  for (std::size_t i = 0; i < v.rows(); ++i) {
    const auto r = v.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    auto o = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) {
      o[j] = std::exp(r[j] - mx);
      z += o[j];
    }
    for (double& e : o) e /= z;
  }
  return x.tape->record(std::move(out), {x}, [x = x.id](Tape& tp, std::size_t self) {
    softmax_backward(tp.value(self), tp.grad_of(self), tp.grad_buffer(x));
  });
}

Var topk_row_softmax(Var x, std::size_t k) {
  if (x.cols() == 0) throw ValidationError("topk_row_softmax: empty rows");
  if (k == 0 || k > x.cols()) {
    throw ValidationError("topk_row_softmax: k must lie in [1, " + std::to_string(x.cols()) + "]");
  }
  const Matrix& v = x.value();
  Matrix out(v.rows(), v.cols());
  std::vector<std::size_t> idx(v.cols());
  for (std::size_t i = 0; i < v.rows(); ++i) {
    const auto r = v.row(i);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return r[a] > r[b]; });
    const double mx = r[idx[0]];
    double z = 0.0;
    auto o = out.row(i);
    for (std::size_t t = 0; t < k; ++t) {
      o[idx[t]] = std::exp(r[idx[t]] - mx);
      z += o[idx[t]];
    }
    for (std::size_t t = 0; t < k; ++t) o[idx[t]] /= z;
  }
  return x.tape->record(std::move(out), {x}, [x = x.id](Tape& tp, std::size_t self) {
    softmax_backward(tp.value(self), tp.grad_of(self), tp.grad_buffer(x));
  });
}

Var log_softmax_cross_entropy(Var logits, std::span<const int> labels,
                              std::span<const std::size_t> mask) {
  if (mask.empty()) throw ValidationError("cross entropy: empty mask");
  const Matrix& v = logits.value();
  if (labels.size() != v.rows()) throw ValidationError("cross entropy: label count mismatch");
  if (v.cols() == 0) throw ValidationError("cross entropy: empty rows");
  const double inv = 1.0 / static_cast<double>(mask.size());
  Matrix probs(mask.size(), v.cols());
  double loss = 0.0;
  for (std::size_t t = 0; t < mask.size(); ++t) {
    const std::size_t i = mask[t];
    if (i >= v.rows()) throw ValidationError("cross entropy: mask index out of range");
    const int y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= v.cols()) {
      throw ValidationError("cross entropy: label out of range");
    }
    const auto r = v.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    auto p = probs.row(t);
    for (std::size_t j = 0; j < r.size(); ++j) {
      p[j] = std::exp(r[j] - mx);
      z += p[j];
    }
    for (double& e : p) e /= z;
    loss += (mx + std::log(z)) - r[static_cast<std::size_t>(y)];
  }
  Matrix out(1, 1, loss * inv);
  std::vector<std::size_t> rows(mask.begin(), mask.end());
  std::vector<int> ys(labels.begin(), labels.end());
  return logits.tape->record(
      std::move(out), {logits},
      [x = logits.id, probs = std::move(probs), rows = std::move(rows), ys = std::move(ys),
       inv](Tape& tp, std::size_t self) {
        const double g = tp.grad_of(self)(0, 0) * inv;
        Matrix& gx = tp.grad_buffer(x);
        for (std::size_t t = 0; t < rows.size(); ++t) {
          auto dst = gx.row(rows[t]);
          const auto p = probs.row(t);
          for (std::size_t j = 0; j < p.size(); ++j) dst[j] += g * p[j];
          dst[static_cast<std::size_t>(ys[rows[t]])] -= g;
        }
      });
}

Var reduce_sum(Var x) {
  const Matrix& v = x.value();
  const double s = std::accumulate(v.values().begin(), v.values().end(), 0.0);
  return x.tape->record(Matrix(1, 1, s), {x}, [x = x.id](Tape& tp, std::size_t self) {
    const double g = tp.grad_of(self)(0, 0);
    for (double& e : tp.grad_buffer(x).values()) e += g;
  });
}

Var concat_columns(std::span<const Var> blocks) {
  if (blocks.empty()) throw ValidationError("concat_columns: no blocks");
  Tape* t = blocks.front().tape;
  std::vector<Matrix> values;
  values.reserve(blocks.size());
  std::vector<std::size_t> ids;
  std::vector<std::size_t> widths;
  for (const Var& b : blocks) {
    values.push_back(b.value());
    ids.push_back(b.id);
    widths.push_back(b.cols());
  }
  Matrix out = nodemoe::concat_columns(values);
  return t->record(std::move(out), blocks, [ids, widths](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    std::size_t offset = 0;
    for (std::size_t b = 0; b < ids.size(); ++b) {
      if (tp.requires_grad(ids[b])) {
        Matrix& gb = tp.grad_buffer(ids[b]);
        for (std::size_t i = 0; i < g.rows(); ++i) {
          kern().axpy(1.0, g.row(i).data() + offset, gb.row(i).data(), widths[b]);
        }
      }
      offset += widths[b];
    }
  });
}

Var linear_combination(Var coeffs, std::span<const Var> blocks) {
  if (blocks.empty()) throw ValidationError("linear_combination: no blocks");
  if (coeffs.cols() != 1 || coeffs.rows() != blocks.size()) {
    throw ValidationError("linear_combination: " + std::to_string(coeffs.rows()) +
                          " coefficients for " + std::to_string(blocks.size()) + " blocks");
  }
  Tape* t = coeffs.tape;
  const Matrix& first = blocks.front().value();
  Matrix out(first.rows(), first.cols());
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    if (!blocks[k].value().same_shape(first)) {
      throw ValidationError("linear_combination: block shapes differ");
    }
    kern().axpy(coeffs.value()(k, 0), blocks[k].value().data(), out.data(), out.size());
  }
  std::vector<Var> inputs(blocks.begin(), blocks.end());
  inputs.push_back(coeffs);
  std::vector<std::size_t> ids;
  for (const Var& b : blocks) ids.push_back(b.id);
  return t->record(std::move(out), inputs, [c = coeffs.id, ids](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& cv = tp.value(c);
    for (std::size_t k = 0; k < ids.size(); ++k) {
      if (tp.requires_grad(ids[k])) {
        kern().axpy(cv(k, 0), g.data(), tp.grad_buffer(ids[k]).data(), g.size());
      }
    }
    if (tp.requires_grad(c)) {
      Matrix& gc = tp.grad_buffer(c);
      for (std::size_t k = 0; k < ids.size(); ++k) {
        gc(k, 0) += kern().dot(g.data(), tp.value(ids[k]).data(), g.size());
      }
    }
  });
}

Var column(Var x, std::size_t j) {
  if (j >= x.cols()) throw ValidationError("column: index out of range");
  const Matrix& v = x.value();
  Matrix out(v.rows(), 1);
  for (std::size_t i = 0; i < v.rows(); ++i) out(i, 0) = v(i, j);
  return x.tape->record(std::move(out), {x}, [x = x.id, j](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    Matrix& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.rows(); ++i) gx(i, j) += g(i, 0);
  });
}

Var scale_rows(Var x, Var w) {
  Tape* t = tape_of(x, w);
  if (w.cols() != 1 || w.rows() != x.rows()) {
    throw ValidationError("scale_rows: weights must be " + std::to_string(x.rows()) + " x 1");
  }
  Matrix out = x.value();
  const Matrix& wv = w.value();
  for (std::size_t i = 0; i < out.rows(); ++i) kern().scale(wv(i, 0), out.row(i).data(), out.cols());
  return t->record(std::move(out), {x, w}, [x = x.id, w = w.id](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    const Matrix& xv = tp.value(x);
    const Matrix& wv = tp.value(w);
    if (tp.requires_grad(x)) {
      Matrix& gx = tp.grad_buffer(x);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        kern().axpy(wv(i, 0), g.row(i).data(), gx.row(i).data(), g.cols());
      }
    }
    if (tp.requires_grad(w)) {
      Matrix& gw = tp.grad_buffer(w);
      for (std::size_t i = 0; i < g.rows(); ++i) {
        gw(i, 0) += kern().dot(g.row(i).data(), xv.row(i).data(), g.cols());
      }
    }
  });
}

Var column_sums(Var x) {
  const Matrix& v = x.value();
  Matrix out(1, v.cols());
  for (std::size_t i = 0; i < v.rows(); ++i) kern().axpy(1.0, v.row(i).data(), out.data(), v.cols());
  return x.tape->record(std::move(out), {x}, [x = x.id](Tape& tp, std::size_t self) {
    const Matrix& g = tp.grad_of(self);
    Matrix& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < gx.rows(); ++i) kern().axpy(1.0, g.data(), gx.row(i).data(), g.cols());
  });
}

Var standardize_columns(Var x, double eps) {
  const Matrix& v = x.value();
  const std::size_t n = v.rows();
  const std::size_t c = v.cols();
  if (n == 0) throw ValidationError("standardize_columns: no rows");
  if (!(eps > 0.0)) throw ValidationError("standardize_columns: eps must be positive");
  const double inv_n = 1.0 / static_cast<double>(n);
  std::vector<double> mean(c, 0.0), inv_sd(c, 0.0);
  for (std::size_t i = 0; i < n; ++i) kern().axpy(inv_n, v.row(i).data(), mean.data(), c);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) inv_sd[j] += (v(i, j) - mean[j]) * (v(i, j) - mean[j]);
  }
  for (double& s : inv_sd) s = 1.0 / std::sqrt(s * inv_n + eps);
  Matrix out(n, c);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < c; ++j) out(i, j) = (v(i, j) - mean[j]) * inv_sd[j];
  }
  return x.tape->record(std::move(out), {x}, [x = x.id, inv_sd, inv_n](Tape& tp, std::size_t self) {
    // dx = inv_sd * (g - mean(g) - y * mean(g * y)) per column
    const Matrix& g = tp.grad_of(self);
    const Matrix& y = tp.value(self);
    const std::size_t cols = g.cols();
    std::vector<double> mg(cols, 0.0), mgy(cols, 0.0);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        mg[j] += g(i, j) * inv_n;
        mgy[j] += g(i, j) * y(i, j) * inv_n;
      }
    }
    Matrix& gx = tp.grad_buffer(x);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < cols; ++j) gx(i, j) += inv_sd[j] * (g(i, j) - mg[j] - y(i, j) * mgy[j]);
    }
  });
}

Var cv_squared(Var row) {
  if (row.rows() != 1 || row.cols() == 0) throw ValidationError("cv_squared: expects a 1 x m row");
  constexpr double kEps = 1e-10;
  const Matrix& v = row.value();
  const std::size_t m = v.cols();
  if (m == 1) {
    return row.tape->record(Matrix(1, 1, 0.0), {row}, [](Tape&, std::size_t) {});
  }
  const double mf = static_cast<double>(m);
  const double mean = std::accumulate(v.values().begin(), v.values().end(), 0.0) / mf;
  double ss = 0.0;
  for (double e : v.values()) ss += (e - mean) * (e - mean);
  const double var = ss / (mf - 1.0);
  const double denom = mean * mean + kEps;
  return row.tape->record(
      Matrix(1, 1, var / denom), {row},
      [r = row.id, mean, var, denom, mf](Tape& tp, std::size_t self) {
        const double g = tp.grad_of(self)(0, 0);
        const Matrix& v = tp.value(r);
        Matrix& gr = tp.grad_buffer(r);
        const double dmean = -var * 2.0 * mean / (denom * denom) / mf;
        for (std::size_t o = 0; o < v.cols(); ++o) {
          const double dvar = 2.0 * (v(0, o) - mean) / (mf - 1.0) / denom;
          gr(0, o) += g * (dvar + dmean);
        }
      });
}

}  // namespace nodemoe::ad
