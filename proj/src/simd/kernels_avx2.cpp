// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

// AVX2 + FMA kernels. This file is compiled with -mavx2 -mfma on x86-64 and
// only reached after a runtime CPUID check.

#include "nodemoe/simd/kernels.hpp"

#include <cmath>

#if defined(__AVX2__) && defined(__FMA__)
#include <immintrin.h>
#endif

namespace nodemoe::simd {

#if defined(__AVX2__) && defined(__FMA__)
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d shuf = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, shuf));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void relu(const double* x, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    // and-mask rather than max so that -0.0 and NaN map exactly as the scalar path
    const __m256d keep = _mm256_cmp_pd(v, zero, _CMP_NLE_UQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(v, keep));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 || std::isnan(x[i]) ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* g, double* acc, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
    const __m256d gi = _mm256_and_pd(_mm256_loadu_pd(g + i), keep);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), gi));
  }
  for (; i < n; ++i) {
    if (x[i] > 0.0) acc[i] += g[i];
  }
}

void abs(const double* x, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(out + i, _mm256_andnot_pd(sign, _mm256_loadu_pd(x + i)));
  }
  for (; i < n; ++i) out[i] = x[i] < 0.0 ? -x[i] : x[i];
}

void abs_backward(const double* x, const double* g, double* acc, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    const __m256d gi = _mm256_loadu_pd(g + i);
    const __m256d pos = _mm256_and_pd(gi, _mm256_cmp_pd(v, zero, _CMP_GT_OQ));
    const __m256d neg = _mm256_and_pd(gi, _mm256_cmp_pd(v, zero, _CMP_LT_OQ));
    _mm256_storeu_pd(acc + i, _mm256_sub_pd(_mm256_add_pd(_mm256_loadu_pd(acc + i), pos), neg));
  }
  for (; i < n; ++i) {
    if (x[i] > 0.0) {
      acc[i] += g[i];
    } else if (x[i] < 0.0) {
      acc[i] -= g[i];
    }
  }
}

// 4 rows x 8 columns register block.
inline void gemm_block_4x8(const double* a, const double* b, double* c, std::size_t k,
                           std::size_t n) {
  __m256d c00 = _mm256_loadu_pd(c);
  __m256d c01 = _mm256_loadu_pd(c + 4);
  __m256d c10 = _mm256_loadu_pd(c + n);
  __m256d c11 = _mm256_loadu_pd(c + n + 4);
  __m256d c20 = _mm256_loadu_pd(c + 2 * n);
  __m256d c21 = _mm256_loadu_pd(c + 2 * n + 4);
  __m256d c30 = _mm256_loadu_pd(c + 3 * n);
  __m256d c31 = _mm256_loadu_pd(c + 3 * n + 4);
  for (std::size_t p = 0; p < k; ++p) {
    const __m256d b0 = _mm256_loadu_pd(b + p * n);
    const __m256d b1 = _mm256_loadu_pd(b + p * n + 4);
    __m256d av = _mm256_broadcast_sd(a + p);
    c00 = _mm256_fmadd_pd(av, b0, c00);
    c01 = _mm256_fmadd_pd(av, b1, c01);
    av = _mm256_broadcast_sd(a + k + p);
    c10 = _mm256_fmadd_pd(av, b0, c10);
    c11 = _mm256_fmadd_pd(av, b1, c11);
    av = _mm256_broadcast_sd(a + 2 * k + p);
    c20 = _mm256_fmadd_pd(av, b0, c20);
    c21 = _mm256_fmadd_pd(av, b1, c21);
    av = _mm256_broadcast_sd(a + 3 * k + p);
    c30 = _mm256_fmadd_pd(av, b0, c30);
    c31 = _mm256_fmadd_pd(av, b1, c31);
  }
  _mm256_storeu_pd(c, c00);
  _mm256_storeu_pd(c + 4, c01);
  _mm256_storeu_pd(c + n, c10);
  _mm256_storeu_pd(c + n + 4, c11);
  _mm256_storeu_pd(c + 2 * n, c20);
  _mm256_storeu_pd(c + 2 * n + 4, c21);
  _mm256_storeu_pd(c + 3 * n, c30);
  _mm256_storeu_pd(c + 3 * n + 4, c31);
}

// One row, columns [j0, n).
inline void gemm_row_tail(const double* a, const double* b, double* c, std::size_t k,
                          std::size_t n, std::size_t j0) {
  std::size_t j = j0;
  for (; j + 4 <= n; j += 4) {
    __m256d acc = _mm256_loadu_pd(c + j);
    for (std::size_t p = 0; p < k; ++p) {
      acc = _mm256_fmadd_pd(_mm256_broadcast_sd(a + p), _mm256_loadu_pd(b + p * n + j), acc);
    }
    _mm256_storeu_pd(c + j, acc);
  }
  for (; j < n; ++j) {
    double acc = c[j];
    for (std::size_t p = 0; p < k; ++p) acc += a[p] * b[p * n + j];
    c[j] = acc;
  }
}

void gemm(const double* a, const double* b, double* c, std::size_t m, std::size_t k,
          std::size_t n) {
  const std::size_t n8 = n - n % 8;
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    for (std::size_t j = 0; j < n8; j += 8) {
      gemm_block_4x8(a + i * k, b + j, c + i * n + j, k, n);
    }
    for (std::size_t r = 0; r < 4; ++r) {
      gemm_row_tail(a + (i + r) * k, b, c + (i + r) * n, k, n, n8);
    }
  }
  for (; i < m; ++i) gemm_row_tail(a + i * k, b, c + i * n, k, n, 0);
}

void spmm(const CsrView& op, const double* x, double* y, std::size_t cols) {
  for (std::size_t i = 0; i < op.rows; ++i) {
    double* yi = y + i * cols;
    const double d = op.diag != nullptr ? op.diag[i] : 0.0;
    const double* xi = x + i * cols;
    const __m256d vd = _mm256_set1_pd(d);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) _mm256_storeu_pd(yi + j, _mm256_mul_pd(vd, _mm256_loadu_pd(xi + j)));
    for (; j < cols; ++j) yi[j] = d * xi[j];
    for (std::size_t e = op.offsets[i]; e < op.offsets[i + 1]; ++e) {
      axpy(op.values[e], x + op.targets[e] * cols, yi, cols);
    }
  }
}

const KernelTable kTable{
    Backend::avx2, dot, axpy, scale, mul, relu, relu_backward, abs, abs_backward, gemm, spmm,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kTable; }

#else

const KernelTable* avx2_kernels() { return nullptr; }

#endif

}  // namespace nodemoe::simd
