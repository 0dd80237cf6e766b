// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nodemoe/common.hpp"
#include "nodemoe/simd/kernels.hpp"

namespace nodemoe {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  require(data_.size() == rows * cols, "matrix data size does not match shape");
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t r = rows.size();
  const std::size_t c = r == 0 ? 0 : rows.begin()->size();
  Matrix m(r, c);
  std::size_t i = 0;
  for (const auto& row : rows) {
    require(row.size() == c, "ragged initializer for matrix");
    std::copy(row.begin(), row.end(), m.data_.begin() + static_cast<std::ptrdiff_t>(i * c));
    ++i;
  }
  return m;
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) t(j, i) = a(i, j);
  }
  return t;
}

void matmul_accumulate(const Matrix& a, const Matrix& b, Matrix& c) {
  require(a.cols() == b.rows(), "matmul: inner dimensions differ (" + std::to_string(a.cols()) +
                                    " vs " + std::to_string(b.rows()) + ")");
  require(c.rows() == a.rows() && c.cols() == b.cols(), "matmul: output shape mismatch");
  if (a.rows() == 0 || b.cols() == 0 || a.cols() == 0) return;
  simd::active().gemm(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  matmul_accumulate(a, b, c);
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) { return matmul(transpose(a), b); }

Matrix matmul_nt(const Matrix& a, const Matrix& b) { return matmul(a, transpose(b)); }

Matrix concat_columns(std::span<const Matrix> blocks) {
  if (blocks.empty()) return {};
  const std::size_t rows = blocks.front().rows();
  std::size_t cols = 0;
  for (const Matrix& b : blocks) {
    require(b.rows() == rows, "concat_columns: row counts differ");
    cols += b.cols();
  }
  Matrix out(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    double* dst = out.row(i).data();
    for (const Matrix& b : blocks) {
      auto src = b.row(i);
      dst = std::copy(src.begin(), src.end(), dst);
    }
  }
  return out;
}

double max_abs(const Matrix& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  require(a.same_shape(b), "max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

double frobenius_norm(const Matrix& a) {
  return std::sqrt(simd::active().dot(a.data(), a.data(), a.size()));
}

}  // namespace nodemoe
