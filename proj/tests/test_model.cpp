// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "nodemoe/common.hpp"
#include "nodemoe/model.hpp"
#include "test_util.hpp"

using namespace nodemoe;

namespace {

ModelConfig small_config(std::size_t experts, std::size_t d = 4, std::size_t c = 3) {
  ModelConfig cfg;
  cfg.in_dim = d;
  cfg.num_classes = c;
  const auto inits = default_inits(experts);
  for (auto init : inits) cfg.experts.push_back(ExpertConfig{3, 8, init, 0.5});
  cfg.gate.hidden = 6;
  cfg.dropout = 0.0;
  cfg.seed = 5;
  return cfg;
}

Matrix softmax_rows(Matrix m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    auto r = m.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double s = 0;
    for (double& v : r) s += (v = std::exp(v - mx));
    for (double& v : r) v /= s;
  }
  return m;
}

// relu(X W1 + b1) W2 + b2 by hand.
Matrix mlp(const Matrix& x, NodeMoe& m, const std::string& p) {
  const auto& w1 = m.param(p + "w1").value;
  const auto& b1 = m.param(p + "b1").value;
  const auto& w2 = m.param(p + "w2").value;
  const auto& b2 = m.param(p + "b2").value;
  Matrix h = testing::naive_matmul(x, w1);
  for (std::size_t i = 0; i < h.rows(); ++i) {
    for (std::size_t j = 0; j < h.cols(); ++j) h(i, j) = std::max(0.0, h(i, j) + b1(0, j));
  }
  Matrix z = testing::naive_matmul(h, w2);
  for (std::size_t i = 0; i < z.rows(); ++i) {
    for (std::size_t j = 0; j < z.cols(); ++j) z(i, j) += b2(0, j);
  }
  return z;
}

LabelVector random_labels(std::size_t n, int c, std::mt19937_64& rng) {
  LabelVector y;
  y.num_classes = c;
  for (std::size_t i = 0; i < n; ++i) y.labels.push_back(static_cast<int>(rng() % c));
  return y;
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("gate input on K2") {
  const Graph g = build_graph(std::vector<Edge>{{0, 1}}, 2);
  const Matrix in = gate_input(g, Matrix::from_rows({{1}, {0}}));
  CHECK(in == Matrix::from_rows({{1, 1, 0}, {0, 1, 0}}));
}

TEST_CASE("default inits") {
  using enum InitStrategy;
  CHECK(default_inits(1) == std::vector<InitStrategy>{uniform});
  CHECK(default_inits(2) == std::vector<InitStrategy>{decreasing, increasing});
  CHECK(default_inits(3) == std::vector<InitStrategy>{decreasing, uniform, increasing});
  CHECK(default_inits(4).back() == decreasing);
}

TEST_CASE("config validation") {
  auto cfg = small_config(2);
  cfg.experts[1].init = cfg.experts[0].init;
  CHECK_THROWS_AS(NodeMoe{cfg}, ValidationError);
  cfg = small_config(2);
  cfg.gate.mode = GateMode::topk;
  cfg.gate.k = 3;
  CHECK_THROWS_AS(NodeMoe{cfg}, ValidationError);
  cfg.gate.k = 1;
  CHECK_NOTHROW(NodeMoe{cfg});
  CHECK_THROWS_AS(parse_gate_mode("hard"), ValidationError);
  cfg = small_config(1);
  cfg.dropout = 1.0;
  CHECK_THROWS_AS(NodeMoe{cfg}, ValidationError);
}

TEST_CASE("single uniform-init expert is the plain MLP and has no gate") {
  std::mt19937_64 rng(41);
  const Graph g = testing::random_graph(10, 0.3, rng);
  ModelInputs in(g, testing::random_matrix(10, 4, rng));
  NodeMoe m(small_config(1));
  CHECK_THROWS_AS(m.param("gate.out.w"), ValidationError);
  const Matrix probs = m.predict(in);
  CHECK(max_abs_diff(probs, softmax_rows(mlp(in.features, m, "expert0."))) <= 1e-12);
  const Matrix gw = m.gate_weights(in);
  CHECK(gw == Matrix(10, 1, 1.0));
}

TEST_CASE("expert output equals the dense polynomial filter of the MLP output") {
  std::mt19937_64 rng(42);
  const Graph g = testing::random_graph(9, 0.4, rng);
  ModelInputs in(g, testing::random_matrix(9, 4, rng));
  NodeMoe m(small_config(2));
  ad::Tape t;
  const auto fwd = m.forward(t, in);
  const Matrix dense = in.laplacian->dense();
  for (std::size_t o = 0; o < 2; ++o) {
    const std::string p = "expert" + std::to_string(o) + ".";
    const Matrix& theta = m.param(p + "theta").value;
    Matrix tk_prev = mlp(in.features, m, p);
    Matrix tk = testing::naive_matmul(dense, tk_prev);
    Matrix expect(9, 3);
    for (std::size_t i = 0; i < expect.size(); ++i) {
      expect.data()[i] = theta(0, 0) * tk_prev.data()[i] + theta(1, 0) * tk.data()[i];
    }
    for (std::size_t k = 2; k < theta.rows(); ++k) {
      Matrix next = testing::naive_matmul(dense, tk);
      for (std::size_t i = 0; i < next.size(); ++i) next.data()[i] = 2 * next.data()[i] - tk_prev.data()[i];
      for (std::size_t i = 0; i < expect.size(); ++i) expect.data()[i] += theta(k, 0) * next.data()[i];
      tk_prev = tk;
      tk = next;
    }
    CHECK(max_abs_diff(fwd.expert_logits[o].value(), expect) <= 1e-10);
  }
}

TEST_CASE("predictions combine experts by gate weights") {
  std::mt19937_64 rng(43);
  const Graph g = testing::random_graph(12, 0.3, rng);
  ModelInputs in(g, testing::random_matrix(12, 4, rng));
  NodeMoe m(small_config(3));
  ad::Tape t;
  const auto fwd = m.forward(t, in);
  std::vector<Matrix> zs;
  for (const auto& z : fwd.expert_logits) zs.push_back(z.value());
  const Matrix gate = m.gate_weights(in);
  CHECK(max_abs_diff(m.predict(in), moe_combine(gate, zs)) <= 1e-12);
  for (std::size_t i = 0; i < 12; ++i) {
    double s = 0;
    for (double v : gate.row(i)) {
      CHECK(v >= 0.0);
      s += v;
    }
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("top-1 gating selects exactly one expert per node") {
  std::mt19937_64 rng(44);
  const Graph g = testing::random_graph(15, 0.3, rng);
  ModelInputs in(g, testing::random_matrix(15, 4, rng));
  auto cfg = small_config(3);
  cfg.gate.mode = GateMode::topk;
  cfg.gate.k = 1;
  NodeMoe m(cfg);
  const Matrix gate = m.gate_weights(in);
  for (std::size_t i = 0; i < 15; ++i) {
    const auto r = gate.row(i);
    CHECK(std::count(r.begin(), r.end(), 1.0) == 1);
    CHECK(std::count(r.begin(), r.end(), 0.0) == 2);
  }
}

TEST_CASE("node permutation permutes predictions") {
  std::mt19937_64 rng(45);
  const std::size_t n = 14;
  const Graph g = testing::random_graph(n, 0.3, rng);
  const Matrix x = testing::random_matrix(n, 4, rng);
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Edge> pe;
  for (const auto& [u, v] : g.edge_list()) pe.emplace_back(perm[u], perm[v]);
  Matrix px(n, 4);
  for (std::size_t i = 0; i < n; ++i) std::copy_n(x.row(i).data(), 4, px.row(perm[i]).data());

  NodeMoe m(small_config(3));
  const Matrix a = m.predict(ModelInputs(g, x));
  const Matrix b = m.predict(ModelInputs(build_graph(pe, n), px));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(std::abs(a(i, j) - b(perm[i], j)) <= 1e-12);
  }
}

TEST_CASE("full loss gradient matches central differences") {
  constexpr double kStep = 1e-6;
  constexpr double kRelTol = 1e-5;
  constexpr double kAbsTol = 1e-7;
  std::mt19937_64 rng(46);
  const Graph g = testing::random_graph(10, 0.35, rng);
  ModelInputs in(g, testing::random_matrix(10, 4, rng));
  const LabelVector y = random_labels(10, 3, rng);
  const std::vector<std::size_t> mask{0, 1, 2, 3, 5, 8};
  const LossWeights w{0.3, 0.2};
  NodeMoe m(small_config(2));
  // Zero biases put all-zero hidden rows exactly on a relu kink.
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  for (auto* p : m.params()) {
    if (p->name.find(".b") != std::string::npos) {
      for (double& v : p->value.values()) v = jitter(rng);
    }
  }

  auto total = [&] {
    ad::Tape t;
    const auto fwd = m.forward(t, in);
    return m.loss(t, fwd, y, mask, w).total.value()(0, 0);
  };
  for (auto* p : m.params()) p->zero_grad();
  {
    ad::Tape t;
    const auto fwd = m.forward(t, in);
    t.backward(m.loss(t, fwd, y, mask, w).total);
  }
  std::size_t checked = 0;
  for (auto* p : m.params()) {
    for (std::size_t e = 0; e < p->value.size(); e += 3) {
      double& v = p->value.data()[e];
      const double orig = v;
      v = orig + kStep;
      const double up = total();
      v = orig - kStep;
      const double down = total();
      v = orig;
      const double fd = (up - down) / (2 * kStep);
      const double an = p->grad.data()[e];
      CAPTURE(p->name);
      CAPTURE(e);
      CHECK(std::abs(fd - an) <= kAbsTol + kRelTol * std::max(std::abs(fd), std::abs(an)));
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("loss parts report the unweighted terms") {
  std::mt19937_64 rng(47);
  const Graph g = testing::random_graph(10, 0.35, rng);
  ModelInputs in(g, testing::random_matrix(10, 4, rng));
  const LabelVector y = random_labels(10, 3, rng);
  const std::vector<std::size_t> mask{0, 1, 2};
  NodeMoe m(small_config(2));
  ad::Tape t;
  const auto fwd = m.forward(t, in);
  const auto parts = m.loss(t, fwd, y, mask, LossWeights{2.0, 3.0});
  double smooth = 0;
  for (const auto& f : m.filters()) smooth += smoothing_loss(f, SmoothingGrid::uniform());
  CHECK(parts.smoothing == doctest::Approx(smooth).epsilon(1e-10));
  CHECK(parts.total.value()(0, 0) ==
        doctest::Approx(parts.task + 2.0 * parts.smoothing + 3.0 * parts.balance).epsilon(1e-12));
}

TEST_CASE("load_values copies parameters") {
  NodeMoe a(small_config(2));
  auto cfg = small_config(2);
  cfg.seed = 77;
  NodeMoe b(cfg);
  b.load_values(a);
  auto pa = a.params();
  auto pb = b.params();
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value == pb[i]->value);
  NodeMoe c(small_config(3));
  CHECK_THROWS_AS(c.load_values(a), ValidationError);
}

TEST_CASE("argmax ties go to the lowest column") {
  CHECK(argmax_rows(Matrix::from_rows({{1, 1, 0}, {0, 2, 2}, {3, 1, 2}})) == std::vector<int>{0, 1, 0});
}

}  // TEST_SUITE
