// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nodemoe/graph.hpp"
#include "nodemoe/matrix.hpp"

namespace nodemoe::testing {

inline Matrix random_matrix(std::size_t r, std::size_t c, std::mt19937_64& rng,
                            double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (double& v : m.values()) v = u(rng);
  return m;
}

// G(n, p) with an explicit edge list.
inline Graph random_graph(std::size_t n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (coin(rng)) edges.emplace_back(i, j);
    }
  }
  return build_graph(edges, n);
}

inline Graph clique_pair_with_bridge(std::size_t k) {
  std::vector<Edge> edges;
  for (std::size_t base : {std::size_t{0}, k}) {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) edges.emplace_back(base + i, base + j);
    }
  }
  edges.emplace_back(k - 1, k);
  return build_graph(edges, 2 * k);
}

// Textbook triple loop; the oracle for the kernel-backed products.
inline Matrix naive_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      long double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += static_cast<long double>(a(i, k)) * b(k, j);
      c(i, j) = static_cast<double>(s);
    }
  }
  return c;
}

}  // namespace nodemoe::testing
