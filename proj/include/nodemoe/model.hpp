// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nodemoe/autodiff.hpp"
#include "nodemoe/graph.hpp"
#include "nodemoe/matrix.hpp"
#include "nodemoe/spectral.hpp"

namespace nodemoe {

struct ExpertConfig {
  std::size_t order = 10;
  std::size_t hidden = 64;
  InitStrategy init = InitStrategy::uniform;
  double alpha = 0.5;
};

enum class GateMode { soft, topk };

GateMode parse_gate_mode(std::string_view name);
std::string_view to_string(GateMode mode);

struct GateConfig {
  GateMode mode = GateMode::soft;
  std::size_t k = 0;  // topk only
  std::size_t hidden = 64;
  std::size_t layers = 2;
  double epsilon = 0.0;
};

struct LossWeights {
  double gamma = 0.0;
  double beta = 0.01;

  void validate() const;
};

struct ModelConfig {
  std::size_t in_dim = 0;
  std::size_t num_classes = 0;
  std::vector<ExpertConfig> experts;
  GateConfig gate;
  double dropout = 0.5;
  std::uint64_t seed = 0;

  std::size_t num_experts() const { return experts.size(); }
  // With a single expert the gate is not built.
  bool gated() const { return experts.size() > 1; }
  void validate() const;
};

// Default per-expert inits: 1 -> uniform; 2 -> decreasing, increasing;
// 3 -> decreasing, uniform, increasing; larger m cycles through those three.
std::vector<InitStrategy> default_inits(std::size_t experts);

// [X, |A~X - X|, |A~^2 X - X|] with A~ the symmetric normalized adjacency.
Matrix gate_input(const Graph& g, const Matrix& x);

// Graph-derived tensors shared by every forward pass over one dataset.
struct ModelInputs {
  ModelInputs(const Graph& g, Matrix features);

  Graph graph;
  Matrix features;
  Matrix gate_features;
  std::unique_ptr<NormalizedOperator> laplacian;  // shifted, spectrum [-1, 1]
  std::unique_ptr<NormalizedOperator> adjacency;  // raw neighbor sum for GIN
};

struct ForwardResult {
  ad::Var logits;                    // sum_o w[:, o] * Z_o
  std::optional<ad::Var> gate;       // n x m, absent when m == 1
  std::vector<ad::Var> expert_logits;
  std::vector<ad::Var> thetas;
};

struct LossParts {
  ad::Var total;
  double task = 0.0;
  double smoothing = 0.0;  // unweighted sum over experts
  double balance = 0.0;    // unweighted CV^2
};

class NodeMoe {
 public:
  explicit NodeMoe(ModelConfig config);

  const ModelConfig& config() const { return config_; }

  // Stable order: experts (mlp weights, theta), then gate.
  std::vector<ad::Param*> params();
  std::vector<const ad::Param*> params() const;
  ad::Param& param(std::string_view name);

  // dropout_rng == nullptr disables dropout (evaluation mode).
  ForwardResult forward(ad::Tape& tape, const ModelInputs& in,
                        std::mt19937_64* dropout_rng = nullptr);

  LossParts loss(ad::Tape& tape, const ForwardResult& fwd, const LabelVector& labels,
                 std::span<const std::size_t> mask, const LossWeights& weights) const;

  // Evaluation-mode class probabilities and gate weights.
  Matrix predict(const ModelInputs& in);
  Matrix gate_weights(const ModelInputs& in);
  std::vector<FilterCoeffs> filters() const;

  // Copies every Param value from `other`; configs must match.
  void load_values(const NodeMoe& other);

 private:
  struct Expert {
    ad::Param w1, b1, w2, b2, theta;
  };
  struct GinLayer {
    ad::Param w1, b1, w2, b2;
  };

  ad::Var expert_forward(ad::Tape& tape, Expert& e, const ModelInputs& in,
                         std::mt19937_64* dropout_rng);
  ad::Var gate_forward(ad::Tape& tape, const ModelInputs& in);

  ModelConfig config_;
  std::vector<Expert> experts_;
  std::vector<GinLayer> gin_;
  ad::Param gate_w_, gate_b_;
  Matrix smoothing_diff_;
};

// Mixing step on plain matrices: softmax(sum_o w[i, o] Z_o[i]).
Matrix moe_combine(const Matrix& gate, std::span<const Matrix> expert_logits);

// Argmax per row, ties to the lowest column.
std::vector<int> argmax_rows(const Matrix& scores);

}  // namespace nodemoe
