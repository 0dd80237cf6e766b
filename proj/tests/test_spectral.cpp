// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "nodemoe/common.hpp"
#include "nodemoe/spectral.hpp"
#include "test_util.hpp"

using namespace nodemoe;

namespace {

Graph k2() { return build_graph(std::vector<Edge>{{0, 1}}, 2); }

// Random graph plus a Hamiltonian ring so that no node is isolated.
Graph ring_plus_random(std::size_t n, double p, std::mt19937_64& rng) {
  std::vector<Edge> edges = testing::random_graph(n, p, rng).edge_list();
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return build_graph(edges, n);
}

// U diag(f(lambda)) U^T H from the dense normalized Laplacian.
Matrix eigen_filter(const Graph& g, const FilterCoeffs& f, const Matrix& h) {
  const std::size_t n = g.num_nodes();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(n, n);
  for (const auto& [u, v] : g.edge_list()) {
    const double w = 1.0 / std::sqrt(static_cast<double>(g.degree(u) * g.degree(v)));
    lap(u, v) -= w;
    lap(v, u) -= w;
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(lap);
  Eigen::VectorXd resp(n);
  for (std::size_t i = 0; i < n; ++i) {
    resp(i) = frequency_response(f, std::clamp(es.eigenvalues()(i), 0.0, 2.0));
  }
  Eigen::MatrixXd eh(n, h.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) eh(i, j) = h(i, j);
  }
  const Eigen::MatrixXd out =
      es.eigenvectors() * resp.asDiagonal() * es.eigenvectors().transpose() * eh;
  Matrix r(n, h.cols());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) r(i, j) = out(i, j);
  }
  return r;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("Chebyshev polynomials") {
  CHECK(chebyshev_t(0, 0.3) == 1.0);
  CHECK(chebyshev_t(1, 0.3) == 0.3);
  CHECK(chebyshev_t(3, 0.5) == doctest::Approx(-1.0).epsilon(1e-15));
  for (double x : {-0.9, -0.2, 0.4, 1.0}) {
    CHECK(chebyshev_t(5, x) == doctest::Approx(std::cos(5 * std::acos(x))).epsilon(1e-12));
  }
}

TEST_CASE("frequency response examples") {
  FilterCoeffs all_pass{{1, 0, 0, 0}};
  for (double l : {0.0, 0.7, 2.0}) CHECK(frequency_response(all_pass, l) == 1.0);
  FilterCoeffs low{{0, -1, 0}};
  CHECK(frequency_response(low, 0.0) == 1.0);
  CHECK(frequency_response(low, 2.0) == -1.0);
  CHECK_THROWS_AS(frequency_response(low, -0.01), ValidationError);
  CHECK_THROWS_AS(frequency_response(low, 2.01), ValidationError);
}

TEST_CASE("frequency response is the degree-K polynomial through its node values") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  FilterCoeffs f;
  for (int k = 0; k <= 7; ++k) f.theta.push_back(u(rng));
  const auto nodes = chebyshev_nodes(7);
  std::vector<double> values;
  for (double x : nodes) values.push_back(frequency_response(f, x + 1.0));
  const FilterCoeffs back = interpolate_node_values(values);
  for (std::size_t k = 0; k < f.theta.size(); ++k) CHECK(std::abs(back.theta[k] - f.theta[k]) < 1e-12);
  // A (K+2)-th evaluation point is predicted by the K+1 node values.
  for (double l : {0.0, 0.33, 1.9}) {
    CHECK(std::abs(frequency_response(back, l) - frequency_response(f, l)) < 1e-9);
  }
}

TEST_CASE("smoothing loss examples") {
  const SmoothingGrid grid3{{0.0, 1.0, 2.0}};
  CHECK(smoothing_loss(FilterCoeffs{{0.5, -0.5}}, grid3) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(smoothing_loss(FilterCoeffs{{3.0, 0.0, 0.0}}, SmoothingGrid::uniform()) == 0.0);
  FilterCoeffs f{{0.2, -0.4, 0.7, 0.1}};
  FilterCoeffs g = f;
  g.theta[0] += 5.0;
  CHECK(smoothing_loss(f, SmoothingGrid::uniform()) ==
        doctest::Approx(smoothing_loss(g, SmoothingGrid::uniform())).epsilon(1e-12));
}

TEST_CASE("smoothing gradient matches central differences") {
  constexpr double kStep = 1e-5;
  const SmoothingGrid grid = SmoothingGrid::uniform();
  FilterCoeffs f{{0.3, -0.8, 0.25, 0.6, -0.1, 0.05}};
  const auto grad = smoothing_loss_gradient(f, grid);
  for (std::size_t k = 0; k < f.theta.size(); ++k) {
    FilterCoeffs plus = f, minus = f;
    plus.theta[k] += kStep;
    minus.theta[k] -= kStep;
    const double fd = (smoothing_loss(plus, grid) - smoothing_loss(minus, grid)) / (2 * kStep);
    const double denom = std::max({std::abs(fd), std::abs(grad[k]), 1e-6});
    CAPTURE(k);
    CHECK(std::abs(fd - grad[k]) / denom <= 1e-5);
  }
}

TEST_CASE("difference matrix reproduces response differences") {
  const SmoothingGrid grid = SmoothingGrid::uniform(11);
  const FilterCoeffs f{{0.1, 0.2, -0.3, 0.4}};
  const Matrix d = smoothing_difference_matrix(grid, 3);
  for (std::size_t i = 0; i < d.rows(); ++i) {
    double r = 0.0;
    for (std::size_t k = 0; k < 4; ++k) r += d(i, k) * f.theta[k];
    CHECK(r == doctest::Approx(frequency_response(f, grid.points[i + 1]) -
                               frequency_response(f, grid.points[i]))
                   .epsilon(1e-12));
  }
}

TEST_CASE("smoothing grid validation") {
  CHECK_THROWS_AS((SmoothingGrid{{0.0, 1.0}}).validate(), ValidationError);
  CHECK_THROWS_AS((SmoothingGrid{{0.0, 1.5, 1.0, 2.0}}).validate(), ValidationError);
  CHECK_NOTHROW(SmoothingGrid::uniform().validate());
  CHECK(SmoothingGrid::uniform().points.size() == 51);
}

TEST_CASE("init_coeffs returns the power sequences") {
  const auto dec = init_coeffs(InitStrategy::decreasing, 0.9, 2);
  CHECK(dec.theta[0] == 1.0);
  CHECK(dec.theta[1] == doctest::Approx(0.9).epsilon(1e-15));
  CHECK(dec.theta[2] == doctest::Approx(0.81).epsilon(1e-15));
  CHECK(init_coeffs(InitStrategy::uniform, 0.5, 3).theta == std::vector<double>{1, 1, 1, 1});
  CHECK(init_coeffs(InitStrategy::increasing, 1.0, 4).theta == std::vector<double>(5, 1.0));
  const auto inc = init_coeffs(InitStrategy::increasing, 0.5, 2);
  CHECK(inc.theta == std::vector<double>{0.25, 0.5, 1.0});
  CHECK_THROWS_AS(init_coeffs(InitStrategy::decreasing, 0.0, 2), ValidationError);
  CHECK_THROWS_AS(init_coeffs(InitStrategy::decreasing, 1.5, 2), ValidationError);
  CHECK_THROWS_AS(init_coeffs(InitStrategy::decreasing, 0.5, 0), ValidationError);
}

TEST_CASE("init_filter gives low-pass, high-pass and identity starts") {
  const auto low = init_filter(InitStrategy::decreasing, 0.5, 10);
  const auto high = init_filter(InitStrategy::increasing, 0.5, 10);
  const auto flat = init_filter(InitStrategy::uniform, 0.5, 10);
  CHECK(frequency_response(low, 0.0) > frequency_response(low, 2.0) + 0.5);
  CHECK(frequency_response(high, 2.0) > frequency_response(high, 0.0) + 0.5);
  CHECK(std::abs(flat.theta[0] - 1.0) < 1e-12);
  for (std::size_t k = 1; k < flat.theta.size(); ++k) CHECK(std::abs(flat.theta[k]) < 1e-12);
  // The node values are reproduced exactly.
  const auto nodes = chebyshev_nodes(10);
  const auto vals = init_coeffs(InitStrategy::decreasing, 0.5, 10).theta;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    CHECK(std::abs(frequency_response(low, nodes[j] + 1.0) - vals[j]) < 1e-12);
  }
}

TEST_CASE("basis on K2 follows the hand recurrence") {
  const NormalizedOperator op(k2(), OperatorKind::shifted_laplacian);
  const auto b = precompute_basis(op, Matrix::from_rows({{1}, {0}}), 2);
  CHECK(b.blocks[0] == Matrix::from_rows({{1}, {0}}));
  CHECK(b.blocks[1] == Matrix::from_rows({{0}, {-1}}));
  CHECK(b.blocks[2] == Matrix::from_rows({{1}, {0}}));
}

TEST_CASE("constant column on a 4-cycle alternates sign") {
  const Graph c4 = build_graph(std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}, {3, 0}}, 4);
  const NormalizedOperator op(c4, OperatorKind::shifted_laplacian);
  const auto b = precompute_basis(op, Matrix(4, 1, 1.0), 5);
  for (std::size_t k = 0; k <= 5; ++k) {
    for (std::size_t i = 0; i < 4; ++i) CHECK(b.blocks[k](i, 0) == doctest::Approx(k % 2 ? -1.0 : 1.0));
  }
}

TEST_CASE("basis blocks satisfy the recurrence against a dense operator") {
  std::mt19937_64 rng(22);
  const Graph g = testing::random_graph(15, 0.3, rng);
  const NormalizedOperator op(g, OperatorKind::shifted_laplacian);
  const Matrix dense = op.dense();
  const Matrix h = testing::random_matrix(15, 3, rng);
  const auto b = precompute_basis(op, h, 6);
  CHECK(b.blocks[0] == h);
  CHECK(max_abs_diff(b.blocks[1], testing::naive_matmul(dense, h)) <= 1e-10);
  for (std::size_t k = 2; k <= 6; ++k) {
    Matrix expect = testing::naive_matmul(dense, b.blocks[k - 1]);
    for (std::size_t i = 0; i < expect.size(); ++i) {
      expect.data()[i] = 2 * expect.data()[i] - b.blocks[k - 2].data()[i];
    }
    CHECK(max_abs_diff(b.blocks[k], expect) <= 1e-10);
  }
}

TEST_CASE("assembled filter equals dense eigendecomposition filtering") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 20; ++t) {
    const std::size_t n = 5 + static_cast<std::size_t>(rng() % 26);
    const Graph g = ring_plus_random(n, 0.2, rng);
    FilterCoeffs f;
    for (int k = 0; k <= 6; ++k) f.theta.push_back(u(rng));
    const Matrix h = testing::random_matrix(n, 2, rng);
    const NormalizedOperator op(g, OperatorKind::shifted_laplacian);
    const Matrix spatial = assemble_filter(precompute_basis(op, h, 6), f);
    CAPTURE(n);
    CHECK(max_abs_diff(spatial, eigen_filter(g, f, h)) <= 1e-8);
  }
}

TEST_CASE("assemble rejects an order mismatch") {
  const NormalizedOperator op(k2(), OperatorKind::shifted_laplacian);
  const auto b = precompute_basis(op, Matrix(2, 1, 1.0), 3);
  CHECK_THROWS_AS(assemble_filter(b, FilterCoeffs{{1, 0}}), ValidationError);
  CHECK_THROWS_AS(precompute_basis(op, Matrix(3, 1), 2), ValidationError);
}

TEST_CASE("init strategy names round-trip") {
  for (auto s : {InitStrategy::decreasing, InitStrategy::increasing, InitStrategy::uniform}) {
    CHECK(parse_init_strategy(to_string(s)) == s);
  }
  CHECK_THROWS_AS(parse_init_strategy("lowpass"), ValidationError);
}

}  // TEST_SUITE
