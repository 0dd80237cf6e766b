// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "nodemoe/simd/kernels.hpp"
#include "test_util.hpp"

using namespace nodemoe;
using simd::Backend;
using simd::KernelTable;

namespace {

// Lane-wise partial sums and FMA contraction reorder rounding; for inputs in
// [-1, 1] and n < 100 the gap stays far below this.
constexpr double kTol = 1e-12;

std::vector<double> rand_vec(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  // A few exact zeros exercise the relu/abs kink handling.
  if (n > 3) v[n / 2] = 0.0;
  return v;
}

std::vector<Backend> simd_backends() {
  std::vector<Backend> out;
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (simd::kernels_for(b) != nullptr) out.push_back(b);
  }
  return out;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar table is always available and detect picks a usable backend") {
  CHECK(simd::kernels_for(Backend::scalar) == &simd::scalar_kernels());
  CHECK(simd::kernels_for(simd::detect_backend()) != nullptr);
  CHECK(simd::active().backend == simd::detect_backend());
}

TEST_CASE("set_backend switches the active table and rejects unavailable backends") {
  const Backend original = simd::active().backend;
  simd::set_backend(Backend::scalar);
  CHECK(simd::active().backend == Backend::scalar);
  for (Backend b : {Backend::avx2, Backend::neon}) {
    if (simd::kernels_for(b) == nullptr) CHECK_THROWS_AS(simd::set_backend(b), std::invalid_argument);
  }
  simd::set_backend(original);
}

TEST_CASE("SIMD elementwise kernels match the scalar reference") {
  const KernelTable& ref = simd::scalar_kernels();
  std::mt19937_64 rng(11);
  for (Backend b : simd_backends()) {
    const KernelTable& k = *simd::kernels_for(b);
    CAPTURE(simd::backend_name(b));
    for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 67, 99}) {
      CAPTURE(n);
      const auto x = rand_vec(n, rng);
      const auto y = rand_vec(n, rng);
      CHECK(std::abs(k.dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= kTol);

      auto y1 = y, y2 = y;
      k.axpy(0.37, x.data(), y1.data(), n);
      ref.axpy(0.37, x.data(), y2.data(), n);
      CHECK(max_diff(y1, y2) <= kTol);

      auto s1 = x, s2 = x;
      k.scale(-1.7, s1.data(), n);
      ref.scale(-1.7, s2.data(), n);
      CHECK(max_diff(s1, s2) == 0.0);

      std::vector<double> o1(n), o2(n);
      k.mul(x.data(), y.data(), o1.data(), n);
      ref.mul(x.data(), y.data(), o2.data(), n);
      CHECK(max_diff(o1, o2) == 0.0);

      k.relu(x.data(), o1.data(), n);
      ref.relu(x.data(), o2.data(), n);
      CHECK(max_diff(o1, o2) == 0.0);

      k.abs(x.data(), o1.data(), n);
      ref.abs(x.data(), o2.data(), n);
      CHECK(max_diff(o1, o2) == 0.0);

      auto a1 = y, a2 = y;
      k.relu_backward(x.data(), y.data(), a1.data(), n);
      ref.relu_backward(x.data(), y.data(), a2.data(), n);
      CHECK(max_diff(a1, a2) == 0.0);

      a1 = y, a2 = y;
      k.abs_backward(x.data(), y.data(), a1.data(), n);
      ref.abs_backward(x.data(), y.data(), a2.data(), n);
      CHECK(max_diff(a1, a2) == 0.0);
    }
  }
}

TEST_CASE("SIMD gemm matches the scalar reference on ragged shapes") {
  const KernelTable& ref = simd::scalar_kernels();
  std::mt19937_64 rng(12);
  for (Backend b : simd_backends()) {
    const KernelTable& k = *simd::kernels_for(b);
    for (std::size_t m : {1, 3, 4, 5, 9}) {
      for (std::size_t kk : {1, 2, 7, 16}) {
        for (std::size_t n : {1, 3, 8, 9, 17, 33}) {
          const auto a = rand_vec(m * kk, rng);
          const auto bb = rand_vec(kk * n, rng);
          auto c1 = rand_vec(m * n, rng);
          auto c2 = c1;
          k.gemm(a.data(), bb.data(), c1.data(), m, kk, n);
          ref.gemm(a.data(), bb.data(), c2.data(), m, kk, n);
          CAPTURE(m);
          CAPTURE(kk);
          CAPTURE(n);
          CHECK(max_diff(c1, c2) <= kTol);
        }
      }
    }
  }
}

TEST_CASE("SIMD spmm matches the scalar reference with and without a diagonal") {
  const KernelTable& ref = simd::scalar_kernels();
  std::mt19937_64 rng(13);
  const Graph g = testing::random_graph(40, 0.2, rng);
  std::vector<double> values = rand_vec(g.targets().size(), rng);
  std::vector<double> diag = rand_vec(g.num_nodes(), rng);
  simd::CsrView view{g.num_nodes(), g.offsets().data(), g.targets().data(), values.data(), nullptr};
  for (Backend b : simd_backends()) {
    const KernelTable& k = *simd::kernels_for(b);
    for (const double* d : {static_cast<const double*>(nullptr), static_cast<const double*>(diag.data())}) {
      view.diag = d;
      for (std::size_t cols : {1u, 2u, 4u, 5u, 13u}) {
        const auto x = rand_vec(g.num_nodes() * cols, rng);
        std::vector<double> y1(x.size(), 9.0), y2(x.size(), -9.0);
        k.spmm(view, x.data(), y1.data(), cols);
        ref.spmm(view, x.data(), y2.data(), cols);
        CHECK(max_diff(y1, y2) <= kTol);
      }
    }
  }
}

TEST_CASE("scalar kernels follow their definitions") {
  const KernelTable& k = simd::scalar_kernels();
  const double x[] = {-1.0, 0.0, 2.0};
  const double g[] = {5.0, 5.0, 5.0};
  double acc[] = {0.0, 0.0, 0.0};
  k.relu_backward(x, g, acc, 3);
  CHECK(acc[0] == 0.0);
  CHECK(acc[1] == 0.0);
  CHECK(acc[2] == 5.0);
  double acc2[] = {0.0, 0.0, 0.0};
  k.abs_backward(x, g, acc2, 3);
  CHECK(acc2[0] == -5.0);
  CHECK(acc2[1] == 0.0);
  CHECK(acc2[2] == 5.0);
}

TEST_CASE("relu passes NaN through on every backend") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> x{nan, -1.0, 2.0, -0.0, nan, 3.0, -nan, 0.5, nan};
  std::vector<const KernelTable*> tables{&simd::scalar_kernels()};
  for (Backend b : simd_backends()) tables.push_back(simd::kernels_for(b));
  for (const KernelTable* k : tables) {
    std::vector<double> out(x.size(), 7.0);
    k->relu(x.data(), out.data(), x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      CAPTURE(i);
      if (std::isnan(x[i])) {
        CHECK(std::isnan(out[i]));
      } else {
        CHECK(out[i] == std::max(x[i], 0.0));
      }
    }
  }
}

}  // TEST_SUITE
