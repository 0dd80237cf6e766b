// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

// AArch64 NEON kernels. Advanced SIMD is mandatory on AArch64, so no runtime
// probe is needed beyond the compile-time target.

#include "nodemoe/simd/kernels.hpp"

#include <cmath>

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>
#endif

namespace nodemoe::simd {

#if defined(__aarch64__) && defined(__ARM_NEON)
namespace {

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale(double alpha, double* x, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(x + i, vmulq_n_f64(vld1q_f64(x + i), alpha));
  for (; i < n; ++i) x[i] *= alpha;
}

void mul(const double* a, const double* b, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  for (; i < n; ++i) out[i] = a[i] * b[i];
}

void relu(const double* x, double* out, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    // NaN passes through, as in the scalar path
    const uint64x2_t keep = vreinterpretq_u64_u32(vmvnq_u32(vreinterpretq_u32_u64(vcleq_f64(v, zero))));
    vst1q_f64(out + i, vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(v), keep)));
  }
  for (; i < n; ++i) out[i] = x[i] > 0.0 || std::isnan(x[i]) ? x[i] : 0.0;
}

void relu_backward(const double* x, const double* g, double* acc, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const uint64x2_t keep = vcgtq_f64(vld1q_f64(x + i), zero);
    const float64x2_t gi =
        vreinterpretq_f64_u64(vandq_u64(vreinterpretq_u64_f64(vld1q_f64(g + i)), keep));
    vst1q_f64(acc + i, vaddq_f64(vld1q_f64(acc + i), gi));
  }
  for (; i < n; ++i) {
    if (x[i] > 0.0) acc[i] += g[i];
  }
}

void abs(const double* x, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(out + i, vabsq_f64(vld1q_f64(x + i)));
  for (; i < n; ++i) out[i] = x[i] < 0.0 ? -x[i] : x[i];
}

void abs_backward(const double* x, const double* g, double* acc, std::size_t n) {
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    const uint64x2_t gi = vreinterpretq_u64_f64(vld1q_f64(g + i));
    const float64x2_t pos = vreinterpretq_f64_u64(vandq_u64(gi, vcgtq_f64(v, zero)));
    const float64x2_t neg = vreinterpretq_f64_u64(vandq_u64(gi, vcltq_f64(v, zero)));
    vst1q_f64(acc + i, vsubq_f64(vaddq_f64(vld1q_f64(acc + i), pos), neg));
  }
  for (; i < n; ++i) {
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
    for (std::size_t p = 0; p < k; ++p) axpy(a[i * k + p], b + p * n, ci, n);
  }
}

void spmm(const CsrView& op, const double* x, double* y, std::size_t cols) {
  for (std::size_t i = 0; i < op.rows; ++i) {
    double* yi = y + i * cols;
    const double d = op.diag != nullptr ? op.diag[i] : 0.0;
    const double* xi = x + i * cols;
    for (std::size_t j = 0; j < cols; ++j) yi[j] = d * xi[j];
    for (std::size_t e = op.offsets[i]; e < op.offsets[i + 1]; ++e) {
      axpy(op.values[e], x + op.targets[e] * cols, yi, cols);
    }
  }
}

const KernelTable kTable{
    Backend::neon, dot, axpy, scale, mul, relu, relu_backward, abs, abs_backward, gemm, spmm,
};

}  // namespace

const KernelTable* neon_kernels() { return &kTable; }

#else

const KernelTable* neon_kernels() { return nullptr; }

#endif

}  // namespace nodemoe::simd
