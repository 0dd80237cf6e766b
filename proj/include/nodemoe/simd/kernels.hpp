// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

namespace nodemoe::simd {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend backend);

// CSR view of a sparse operator: y_i = diag_i * x_i + sum_e values_e * x_{targets_e}.
// diag may be null, meaning no diagonal term.
struct CsrView {
  std::size_t rows = 0;
  const std::size_t* offsets = nullptr;
  const std::size_t* targets = nullptr;
  const double* values = nullptr;
  const double* diag = nullptr;
};

// Inner loops of every dense and sparse operation in the library. One table
// per instruction set; all entries of a table agree with the scalar table up
// to floating-point reassociation (FMA contraction, lane-wise partial sums).
struct KernelTable {
  Backend backend;

  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // x *= alpha
  void (*scale)(double alpha, double* x, std::size_t n);
  // out = a .* b
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  // out = max(x, 0); NaN propagates
  void (*relu)(const double* x, double* out, std::size_t n);
  // acc += g where x > 0
  void (*relu_backward)(const double* x, const double* g, double* acc, std::size_t n);
  // out = |x|
  void (*abs)(const double* x, double* out, std::size_t n);
  // acc += g * sign(x), sign(0) = 0
  void (*abs_backward)(const double* x, const double* g, double* acc, std::size_t n);
  // C[m x n] += A[m x k] * B[k x n], all row-major and dense
  void (*gemm)(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
               std::size_t n);
  // Y[rows x cols] = op(X[rows x cols]); Y is overwritten
  void (*spmm)(const CsrView& op, const double* x, double* y, std::size_t cols);
};

const KernelTable& scalar_kernels();
// Returns nullptr when the backend is not compiled in or not supported by the CPU.
const KernelTable* kernels_for(Backend backend);

// Best backend available on this machine.
Backend detect_backend();

// Kernel table used by the library. Defaults to detect_backend().
const KernelTable& active();
// Forces a backend; throws std::invalid_argument if unavailable.
void set_backend(Backend backend);

}  // namespace nodemoe::simd
