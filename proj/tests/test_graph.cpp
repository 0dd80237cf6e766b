// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nodemoe/common.hpp"
#include "nodemoe/graph.hpp"
#include "test_util.hpp"

using namespace nodemoe;

namespace {

Graph k2() { return build_graph(std::vector<Edge>{{0, 1}}, 2); }

// Dense operator built straight from the definitions, independent of the CSR
// value tables.
Matrix dense_reference(const Graph& g, OperatorKind kind) {
  const std::size_t n = g.num_nodes();
  Matrix a(n, n);
  for (const auto& [u, v] : g.edge_list()) a(u, v) = a(v, u) = 1.0;
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const double di = static_cast<double>(g.degree(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double dj = static_cast<double>(g.degree(j));
      const double sym = (di > 0 && dj > 0) ? a(i, j) / std::sqrt(di * dj) : 0.0;
      switch (kind) {
        case OperatorKind::sym_adj: out(i, j) = sym; break;
        case OperatorKind::row_adj: out(i, j) = di > 0 ? a(i, j) / di : 0.0; break;
        case OperatorKind::sym_laplacian: out(i, j) = (i == j ? 1.0 : 0.0) - sym; break;
        case OperatorKind::shifted_laplacian:
          out(i, j) = -sym - (i == j && di == 0 ? 1.0 : 0.0);
          break;
        case OperatorKind::adjacency: out(i, j) = a(i, j); break;
      }
    }
  }
  return out;
}

Eigen::MatrixXd to_eigen(const Matrix& m) {
  Eigen::MatrixXd e(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) e(i, j) = m(i, j);
  }
  return e;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("build_graph: single edge") {
  const Graph g = k2();
  CHECK(g.num_nodes() == 2);
  CHECK(g.num_edges() == 1);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 1);
  CHECK(std::vector<std::size_t>(g.neighbors(0).begin(), g.neighbors(0).end()) ==
        std::vector<std::size_t>{1});
  CHECK(std::vector<std::size_t>(g.neighbors(1).begin(), g.neighbors(1).end()) ==
        std::vector<std::size_t>{0});
}

TEST_CASE("build_graph drops duplicates and self-loops and reports them") {
  BuildStats stats;
  const Graph g = Graph::build(std::vector<Edge>{{0, 1}, {1, 0}, {0, 0}}, 2, &stats);
  CHECK(g.num_edges() == 1);
  CHECK(g.degree(0) == 1);
  CHECK(stats.input_edges == 3);
  CHECK(stats.self_loops_dropped == 1);
  CHECK(stats.duplicates_dropped == 1);
}

TEST_CASE("build_graph: triangle degrees and CSR invariants") {
  const Graph g = build_graph(std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}, 3);
  for (std::size_t v = 0; v < 3; ++v) CHECK(g.degree(v) == 2);
  const auto off = g.offsets();
  CHECK(off.back() == g.targets().size());
  CHECK(std::is_sorted(off.begin(), off.end()));
}

TEST_CASE("build_graph errors") {
  CHECK_THROWS_AS(build_graph(std::vector<Edge>{{0, 2}}, 2), ValidationError);
  CHECK_THROWS_AS(build_graph(std::vector<Edge>{}, 0), ValidationError);
}

TEST_CASE("random graphs are symmetric, sorted and loop-free") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    const Graph g = testing::random_graph(30, 0.15, rng);
    for (std::size_t u = 0; u < g.num_nodes(); ++u) {
      const auto nb = g.neighbors(u);
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      for (std::size_t v : nb) {
        CHECK(v != u);
        CHECK(g.has_edge(v, u));
      }
      CHECK(g.degree(u) == g.offsets()[u + 1] - g.offsets()[u]);
    }
  }
}

TEST_CASE("operator examples on small graphs") {
  const Matrix x = Matrix::from_rows({{1}, {3}});
  CHECK(apply_operator(NormalizedOperator(k2(), OperatorKind::sym_adj), x) ==
        Matrix::from_rows({{3}, {1}}));
  CHECK(apply_operator(NormalizedOperator(k2(), OperatorKind::sym_laplacian), x) ==
        Matrix::from_rows({{-2}, {2}}));
  const Graph tri = build_graph(std::vector<Edge>{{0, 1}, {1, 2}, {0, 2}}, 3);
  const Matrix c = Matrix::from_rows({{5}, {5}, {5}});
  CHECK(max_abs_diff(apply_operator(NormalizedOperator(tri, OperatorKind::row_adj), c), c) <=
        1e-15);
}

TEST_CASE("isolated nodes follow the zero-degree convention") {
  const Graph g = build_graph(std::vector<Edge>{{0, 1}}, 3);
  const Matrix x = Matrix::from_rows({{1}, {2}, {7}});
  CHECK(apply_operator(NormalizedOperator(g, OperatorKind::sym_adj), x)(2, 0) == 0.0);
  CHECK(apply_operator(NormalizedOperator(g, OperatorKind::row_adj), x)(2, 0) == 0.0);
  CHECK(apply_operator(NormalizedOperator(g, OperatorKind::adjacency), x)(2, 0) == 0.0);
  CHECK(apply_operator(NormalizedOperator(g, OperatorKind::sym_laplacian), x)(2, 0) == 7.0);
  CHECK(apply_operator(NormalizedOperator(g, OperatorKind::shifted_laplacian), x)(2, 0) == -7.0);
}

TEST_CASE("sparse operators match the dense definition on random graphs") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 10; ++t) {
    const std::size_t n = 5 + static_cast<std::size_t>(t) * 4;
    const Graph g = testing::random_graph(n, 0.2, rng);
    const Matrix x = testing::random_matrix(n, 3, rng);
    for (OperatorKind kind : {OperatorKind::sym_adj, OperatorKind::row_adj,
                              OperatorKind::sym_laplacian, OperatorKind::shifted_laplacian,
                              OperatorKind::adjacency}) {
      const NormalizedOperator op(g, kind);
      const Matrix ref = dense_reference(g, kind);
      const Matrix y = op.apply(x);
      const Matrix y_ref = testing::naive_matmul(ref, x);
      CHECK(max_abs_diff(y, y_ref) <= 1e-12 * std::max(1.0, max_abs(y_ref)));
      CHECK(max_abs_diff(op.dense(), ref) <= 1e-15);
      CHECK(max_abs_diff(op.apply_transpose(x), testing::naive_matmul(transpose(ref), x)) <=
            1e-12 * std::max(1.0, max_abs(y_ref)));
    }
  }
}

TEST_CASE("operator spectra lie in the stated ranges") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t) {
    const Graph g = testing::random_graph(25, 0.2, rng);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> adj(
        to_eigen(NormalizedOperator(g, OperatorKind::sym_adj).dense()));
    CHECK(adj.eigenvalues().minCoeff() >= -1.0 - 1e-12);
    CHECK(adj.eigenvalues().maxCoeff() <= 1.0 + 1e-12);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> lap(
        to_eigen(NormalizedOperator(g, OperatorKind::sym_laplacian).dense()));
    CHECK(lap.eigenvalues().minCoeff() >= -1e-12);
    CHECK(lap.eigenvalues().maxCoeff() <= 2.0 + 1e-12);
  }
}

TEST_CASE("linearity and self-adjointness") {
  std::mt19937_64 rng(6);
  const Graph g = testing::random_graph(30, 0.2, rng);
  const Matrix x = testing::random_matrix(30, 2, rng);
  const Matrix y = testing::random_matrix(30, 2, rng);
  for (OperatorKind kind : {OperatorKind::sym_adj, OperatorKind::sym_laplacian,
                            OperatorKind::shifted_laplacian}) {
    const NormalizedOperator op(g, kind);
    Matrix comb(30, 2);
    for (std::size_t i = 0; i < comb.size(); ++i) comb.data()[i] = 2.5 * x.data()[i] - 0.5 * y.data()[i];
    const Matrix lhs = op.apply(comb);
    const Matrix ax = op.apply(x), ay = op.apply(y);
    Matrix rhs(30, 2);
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs.data()[i] = 2.5 * ax.data()[i] - 0.5 * ay.data()[i];
    CHECK(max_abs_diff(lhs, rhs) <= 1e-10);

    double xay = 0.0, axy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      xay += x.data()[i] * ay.data()[i];
      axy += ax.data()[i] * y.data()[i];
    }
    CHECK(std::abs(xay - axy) <= 1e-10);
    CHECK(op.self_adjoint());
  }
  CHECK_FALSE(NormalizedOperator(g, OperatorKind::row_adj).self_adjoint());
}

TEST_CASE("operator rejects a row-count mismatch") {
  const NormalizedOperator op(k2(), OperatorKind::sym_adj);
  CHECK_THROWS_AS(op.apply(Matrix(3, 1)), ValidationError);
}

TEST_CASE("node homophily examples") {
  LabelVector same{{0, 0}, 2};
  LabelVector diff{{0, 1}, 2};
  auto h = node_homophily(k2(), same);
  CHECK(h == std::vector<double>{1.0, 1.0});
  CHECK(graph_homophily(h) == 1.0);
  h = node_homophily(k2(), diff);
  CHECK(graph_homophily(h) == 0.0);

  const Graph path = build_graph(std::vector<Edge>{{0, 1}, {1, 2}}, 3);
  h = node_homophily(path, LabelVector{{0, 0, 1}, 2});
  CHECK(h == std::vector<double>{1.0, 0.5, 0.0});
  CHECK(graph_homophily(h) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("degree-0 nodes get NaN and are excluded from the mean") {
  const Graph g = build_graph(std::vector<Edge>{{0, 1}}, 3);
  const auto h = node_homophily(g, LabelVector{{0, 0, 1}, 2});
  CHECK(std::isnan(h[2]));
  CHECK(graph_homophily(h) == 1.0);
}

TEST_CASE("relabeling nodes permutes homophily consistently") {
  std::mt19937_64 rng(7);
  const Graph g = testing::random_graph(20, 0.25, rng);
  LabelVector y{{}, 3};
  for (std::size_t i = 0; i < 20; ++i) y.labels.push_back(static_cast<int>(rng() % 3));
  std::vector<std::size_t> perm(20);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> edges;
  for (const auto& [u, v] : g.edge_list()) edges.emplace_back(perm[u], perm[v]);
  const Graph pg = build_graph(edges, 20);
  LabelVector py{std::vector<int>(20), 3};
  for (std::size_t i = 0; i < 20; ++i) py.labels[perm[i]] = y.labels[i];
  const auto h = node_homophily(g, y);
  const auto ph = node_homophily(pg, py);
  for (std::size_t i = 0; i < 20; ++i) {
    if (std::isnan(h[i])) {
      CHECK(std::isnan(ph[perm[i]]));
    } else {
      CHECK(ph[perm[i]] == h[i]);
    }
  }
}

TEST_CASE("label vector validation") {
  CHECK_THROWS_AS((LabelVector{{0, 2}, 2}).validate(), ValidationError);
  CHECK_THROWS_AS((LabelVector{{0}, 1}).validate(), ValidationError);
  CHECK_NOTHROW((LabelVector{{0, 1}, 2}).validate());
}

TEST_CASE("induced subgraph keeps only internal edges") {
  const Graph g = testing::clique_pair_with_bridge(4);
  const std::vector<std::size_t> nodes{2, 3, 4};
  const Graph sub = g.induced_subgraph(nodes);
  CHECK(sub.num_nodes() == 3);
  CHECK(sub.num_edges() == 2);  // 2-3 and the bridge 3-4
  CHECK(sub.has_edge(1, 2));
}

}  // TEST_SUITE
