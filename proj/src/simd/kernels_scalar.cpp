// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

// Reference kernels. Every vectorized table is tested against these.

#include "nodemoe/simd/kernels.hpp"

#include <cmath>

namespace nodemoe::simd {
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) x[i] *= alpha;
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

void relu(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > 0.0 || std::isnan(x[i]) ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* g, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) acc[i] += g[i];
  }
}

void abs(const double* x, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] < 0.0 ? -x[i] : x[i];
}

void abs_backward(const double* x, const double* g, double* acc, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (x[i] > 0.0) {
      acc[i] += g[i];
    } else if (x[i] < 0.0) {
      acc[i] -= g[i];
    }
  }
}

void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
          std::size_t n) {
  for (std::size_t i = 0; i < m; ++i) {
    double* ci = c + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double aip = a[i * k + p];
      const double* bp = b + p * n;
      for (std::size_t j = 0; j < n; ++j) ci[j] += aip * bp[j];
    }
  }
}

void spmm(const CsrView& op, const double* x, double* y, std::size_t cols) {
  for (std::size_t i = 0; i < op.rows; ++i) {
    double* yi = y + i * cols;
    const double d = op.diag != nullptr ? op.diag[i] : 0.0;
    const double* xi = x + i * cols;
    for (std::size_t j = 0; j < cols; ++j) yi[j] = d * xi[j];
    for (std::size_t e = op.offsets[i]; e < op.offsets[i + 1]; ++e) {
      const double v = op.values[e];
      const double* xt = x + op.targets[e] * cols;
      for (std::size_t j = 0; j < cols; ++j) yi[j] += v * xt[j];
    }
  }
}

const KernelTable kTable{
    Backend::scalar, dot, axpy, scale, mul, relu, relu_backward, abs, abs_backward, gemm, spmm,
};

}  // namespace

const KernelTable& scalar_kernels() { return kTable; }

}  // namespace nodemoe::simd
