// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nodemoe/common.hpp"

namespace nodemoe {
namespace {

using ad::Param;
using ad::ParamTag;
using ad::Tape;
using ad::Var;

Param glorot(std::string name, std::size_t fan_in, std::size_t fan_out, std::mt19937_64& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Matrix w(fan_in, fan_out);
  for (double& v : w.values()) v = dist(rng);
  return Param(std::move(name), std::move(w), ParamTag::network_weight);
}

Param zeros(std::string name, std::size_t cols) {
  return Param(std::move(name), Matrix(1, cols), ParamTag::network_weight);
}

Var linear(Tape& t, Var x, Param& w, Param& b) {
  return ad::add_row_bias(ad::matmul(x, t.param(w)), t.param(b));
}

Var dropout(Var x, double p, std::mt19937_64* rng) {
  if (rng == nullptr || p <= 0.0) return x;
  std::bernoulli_distribution keep(1.0 - p);
  const double s = 1.0 / (1.0 - p);
  Matrix mask(x.rows(), x.cols());
  for (double& v : mask.values()) v = keep(*rng) ? s : 0.0;
  return ad::mul_constant(x, mask);
}

void softmax_rows_inplace(Matrix& s) {
  for (std::size_t i = 0; i < s.rows(); ++i) {
    auto r = s.row(i);
    const double mx = *std::max_element(r.begin(), r.end());
    double z = 0.0;
    for (double& v : r) z += (v = std::exp(v - mx));
    for (double& v : r) v /= z;
  }
}

}  // namespace

GateMode parse_gate_mode(std::string_view name) {
  if (name == "soft") return GateMode::soft;
  if (name == "topk") return GateMode::topk;
  throw ValidationError("unknown gate mode '" + std::string(name) + "' (expected soft or topk)");
}

std::string_view to_string(GateMode mode) { return mode == GateMode::soft ? "soft" : "topk"; }

void LossWeights::validate() const {
  require(gamma >= 0.0 && std::isfinite(gamma), "gamma must be finite and >= 0");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be finite and >= 0");
}

void ModelConfig::validate() const {
  require(in_dim > 0, "model input dimension must be positive");
  require(num_classes >= 2, "model needs at least 2 classes");
  require(!experts.empty(), "model needs at least one expert");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
  for (const auto& e : experts) {
    require(e.order >= 1, "expert order must be >= 1");
    require(e.hidden >= 1, "expert hidden width must be >= 1");
    require(e.alpha > 0.0 && e.alpha <= 1.0, "expert init alpha must lie in (0, 1]");
  }
  if (experts.size() <= 3) {
    for (std::size_t a = 0; a < experts.size(); ++a) {
      for (std::size_t b = a + 1; b < experts.size(); ++b) {
        if (experts[a].init == experts[b].init) {
          throw ValidationError("experts " + std::to_string(a) + " and " + std::to_string(b) +
                                " share init strategy '" +
                                std::string(to_string(experts[a].init)) +
                                "'; with at most 3 experts each needs a distinct init");
        }
      }
    }
  }
  if (gated()) {
    require(gate.hidden >= 1 && gate.layers >= 1, "gate needs at least one hidden layer");
    require(std::isfinite(gate.epsilon), "gate epsilon must be finite");
    if (gate.mode == GateMode::topk) {
      require(gate.k >= 1 && gate.k <= experts.size(),
              "topk gating needs 1 <= k <= " + std::to_string(experts.size()));
    }
  }
}

std::vector<InitStrategy> default_inits(std::size_t experts) {
  using enum InitStrategy;
  if (experts == 1) return {uniform};
  if (experts == 2) return {decreasing, increasing};
  std::vector<InitStrategy> out;
  const InitStrategy cycle[3] = {decreasing, uniform, increasing};
  for (std::size_t i = 0; i < experts; ++i) out.push_back(cycle[i % 3]);
  return out;
}

Matrix gate_input(const Graph& g, const Matrix& x) {
  require(x.rows() == g.num_nodes(), "feature rows do not match node count");
  NormalizedOperator adj(g, OperatorKind::sym_adj);
  const Matrix ax = adj.apply(x);
  const Matrix aax = adj.apply(ax);
  Matrix d1(x.rows(), x.cols());
  Matrix d2(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) {
    d1.data()[i] = std::abs(ax.data()[i] - x.data()[i]);
    d2.data()[i] = std::abs(aax.data()[i] - x.data()[i]);
  }
  const Matrix blocks[3] = {x, d1, d2};
  return concat_columns(blocks);
}

ModelInputs::ModelInputs(const Graph& g, Matrix x)
    : graph(g),
      features(std::move(x)),
      gate_features(gate_input(g, features)),
      laplacian(std::make_unique<NormalizedOperator>(g, OperatorKind::shifted_laplacian)),
      adjacency(std::make_unique<NormalizedOperator>(g, OperatorKind::adjacency)) {}

NodeMoe::NodeMoe(ModelConfig config) : config_(std::move(config)) {
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  const std::size_t d = config_.in_dim;
  const std::size_t c = config_.num_classes;
  for (std::size_t o = 0; o < config_.experts.size(); ++o) {
    const auto& ec = config_.experts[o];
    const std::string p = "expert" + std::to_string(o) + ".";
    Expert e;
    e.w1 = glorot(p + "w1", d, ec.hidden, rng);
    e.b1 = zeros(p + "b1", ec.hidden);
    e.w2 = glorot(p + "w2", ec.hidden, c, rng);
    e.b2 = zeros(p + "b2", c);
    const FilterCoeffs f = init_filter(ec.init, ec.alpha, ec.order);
    e.theta = Param(p + "theta", Matrix::column(f.theta), ParamTag::filter_coeff);
    experts_.push_back(std::move(e));
  }
  if (config_.gated()) {
    const auto& gc = config_.gate;
    std::size_t width = 3 * d;
    for (std::size_t l = 0; l < gc.layers; ++l) {
      const std::string p = "gate.gin" + std::to_string(l) + ".";
      GinLayer layer;
      layer.w1 = glorot(p + "w1", width, gc.hidden, rng);
      layer.b1 = zeros(p + "b1", gc.hidden);
      layer.w2 = glorot(p + "w2", gc.hidden, gc.hidden, rng);
      layer.b2 = zeros(p + "b2", gc.hidden);
      gin_.push_back(std::move(layer));
      width = gc.hidden;
    }
    gate_w_ = glorot("gate.out.w", width, config_.experts.size(), rng);
    gate_b_ = zeros("gate.out.b", config_.experts.size());
  }
  std::size_t max_order = 0;
  for (const auto& ec : config_.experts) max_order = std::max(max_order, ec.order);
  smoothing_diff_ = smoothing_difference_matrix(SmoothingGrid::uniform(), max_order);
}

std::vector<Param*> NodeMoe::params() {
  std::vector<Param*> out;
  for (auto& e : experts_) {
    for (Param* p : {&e.w1, &e.b1, &e.w2, &e.b2, &e.theta}) out.push_back(p);
  }
  if (config_.gated()) {
    for (auto& l : gin_) {
      for (Param* p : {&l.w1, &l.b1, &l.w2, &l.b2}) out.push_back(p);
    }
    out.push_back(&gate_w_);
    out.push_back(&gate_b_);
  }
  return out;
}

std::vector<const Param*> NodeMoe::params() const {
  auto mut = const_cast<NodeMoe*>(this)->params();
  return {mut.begin(), mut.end()};
}

Param& NodeMoe::param(std::string_view name) {
  for (Param* p : params()) {
    if (p->name == name) return *p;
  }
  throw ValidationError("model has no parameter '" + std::string(name) + "'");
}

Var NodeMoe::expert_forward(Tape& t, Expert& e, const ModelInputs& in,
                            std::mt19937_64* rng) {
  const Var x = t.constant(in.features);
  Var h = ad::relu(linear(t, dropout(x, config_.dropout, rng), e.w1, e.b1));
  h = linear(t, dropout(h, config_.dropout, rng), e.w2, e.b2);

  const std::size_t order = e.theta.value.rows() - 1;
  std::vector<Var> blocks{h};
  blocks.push_back(ad::sparse_apply(*in.laplacian, h));
  for (std::size_t k = 2; k <= order; ++k) {
    const Var lt = ad::sparse_apply(*in.laplacian, blocks[k - 1]);
    blocks.push_back(ad::sub(ad::scale(lt, 2.0), blocks[k - 2]));
  }
  return ad::linear_combination(t.param(e.theta), blocks);
}

Var NodeMoe::gate_forward(Tape& t, const ModelInputs& in) {
  const auto& gc = config_.gate;
  Var h = t.constant(in.gate_features);
  for (auto& l : gin_) {
    // ((1 + eps) h + sum_j h_j) W == (1 + eps) hW + A (hW); the product is
    // taken first so aggregation runs on the narrower width.
    const Var hw = ad::matmul(h, t.param(l.w1));
    const Var agg = ad::add(ad::scale(hw, 1.0 + gc.epsilon), ad::sparse_apply(*in.adjacency, hw));
    // Degree-scaled sums would saturate the softmax; normalize before the bias.
    h = ad::relu(ad::add_row_bias(ad::standardize_columns(agg), t.param(l.b1)));
    h = ad::relu(linear(t, h, l.w2, l.b2));
  }
  const Var logits = linear(t, h, gate_w_, gate_b_);
  return gc.mode == GateMode::soft ? ad::row_softmax(logits) : ad::topk_row_softmax(logits, gc.k);
}

ForwardResult NodeMoe::forward(Tape& t, const ModelInputs& in, std::mt19937_64* rng) {
  require(in.features.cols() == config_.in_dim,
          "features have " + std::to_string(in.features.cols()) + " columns, model expects " +
              std::to_string(config_.in_dim));
  ForwardResult out;
  for (auto& e : experts_) {
    out.expert_logits.push_back(expert_forward(t, e, in, rng));
    out.thetas.push_back(t.param(e.theta));
  }
  if (!config_.gated()) {
    out.logits = out.expert_logits.front();
    return out;
  }
  const Var gate = gate_forward(t, in);
  out.gate = gate;
  Var mixed = ad::scale_rows(out.expert_logits[0], ad::column(gate, 0));
  for (std::size_t o = 1; o < experts_.size(); ++o) {
    mixed = ad::add(mixed, ad::scale_rows(out.expert_logits[o], ad::column(gate, o)));
  }
  out.logits = mixed;
  return out;
}

LossParts NodeMoe::loss(Tape& t, const ForwardResult& fwd, const LabelVector& labels,
                        std::span<const std::size_t> mask, const LossWeights& w) const {
  w.validate();
  LossParts parts;
  const Var task = ad::log_softmax_cross_entropy(fwd.logits, labels.labels, mask);
  parts.task = task.value()(0, 0);
  Var total = task;

  std::vector<Var> smooth;
  for (const Var& theta : fwd.thetas) {
    // Rows of the shared difference matrix are cut to this expert's order.
    const std::size_t cols = theta.rows();
    Matrix d(smoothing_diff_.rows(), cols);
    for (std::size_t i = 0; i < d.rows(); ++i) {
      std::copy_n(smoothing_diff_.row(i).data(), cols, d.row(i).data());
    }
    const Var diff = ad::matmul(t.constant(std::move(d)), theta);
    smooth.push_back(ad::reduce_sum(ad::mul(diff, diff)));
  }
  Var smooth_sum = smooth.front();
  for (std::size_t o = 1; o < smooth.size(); ++o) smooth_sum = ad::add(smooth_sum, smooth[o]);
  parts.smoothing = smooth_sum.value()(0, 0);
  if (w.gamma > 0.0) total = ad::add(total, ad::scale(smooth_sum, w.gamma));

  if (fwd.gate) {
    const Var cv = ad::cv_squared(ad::column_sums(*fwd.gate));
    parts.balance = cv.value()(0, 0);
    if (w.beta > 0.0) total = ad::add(total, ad::scale(cv, w.beta));
  }
  parts.total = total;
  return parts;
}

Matrix NodeMoe::predict(const ModelInputs& in) {
  Tape t;
  const auto fwd = forward(t, in);
  Matrix probs = fwd.logits.value();
  softmax_rows_inplace(probs);
  return probs;
}

Matrix NodeMoe::gate_weights(const ModelInputs& in) {
  if (!config_.gated()) return Matrix(in.features.rows(), 1, 1.0);
  Tape t;
  return gate_forward(t, in).value();
}

std::vector<FilterCoeffs> NodeMoe::filters() const {
  std::vector<FilterCoeffs> out;
  for (const auto& e : experts_) {
    out.push_back(FilterCoeffs{{e.theta.value.values().begin(), e.theta.value.values().end()}});
  }
  return out;
}

void NodeMoe::load_values(const NodeMoe& other) {
  auto dst = params();
  auto src = other.params();
  require(dst.size() == src.size(), "parameter count mismatch");
  for (std::size_t i = 0; i < dst.size(); ++i) {
    require(dst[i]->name == src[i]->name && dst[i]->value.same_shape(src[i]->value),
            "parameter '" + dst[i]->name + "' does not match");
    dst[i]->value = src[i]->value;
  }
}

Matrix moe_combine(const Matrix& gate, std::span<const Matrix> expert_logits) {
  require(!expert_logits.empty(), "moe_combine: no experts");
  require(gate.cols() == expert_logits.size(), "moe_combine: gate width != expert count");
  const Matrix& first = expert_logits.front();
  require(gate.rows() == first.rows(), "moe_combine: gate rows != node count");
  Matrix s(first.rows(), first.cols());
  for (std::size_t o = 0; o < expert_logits.size(); ++o) {
    require(expert_logits[o].same_shape(first), "moe_combine: expert shapes differ");
    for (std::size_t i = 0; i < s.rows(); ++i) {
      for (std::size_t j = 0; j < s.cols(); ++j) s(i, j) += gate(i, o) * expert_logits[o](i, j);
    }
  }
  softmax_rows_inplace(s);
  return s;
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(scores.rows(), 0);
  for (std::size_t i = 0; i < scores.rows(); ++i) {
    const auto r = scores.row(i);
    out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
  }
  return out;
}

}  // namespace nodemoe
