// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nodemoe/graph.hpp"
#include "nodemoe/model.hpp"

namespace nodemoe {

struct SplitFractions {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;

  void validate() const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;

  // "train", "val" or "test".
  const std::vector<std::size_t>& part(std::string_view name) const;
  // Disjoint, in range, and covering all n nodes.
  void validate(std::size_t n) const;
};

// Uniform random permutation cut into round(n * train) / round(n * val) / rest.
// Classes without a training node are reported through `warnings`.
Split make_split(const LabelVector& labels, const SplitFractions& fractions, std::uint64_t seed,
                 std::vector<std::string>* warnings = nullptr);

struct TrainConfig {
  std::size_t max_epochs = 1000;
  std::size_t patience = 100;
  double lr_filter = 0.01;
  double lr_network = 0.01;
  double wd_filter = 0.0005;
  double wd_network = 0.0005;
  LossWeights loss;
  std::uint64_t seed = 0;  // dropout stream

  void validate() const;
};

struct HistoryRow {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_acc = 0.0;
  double smoothing_loss = 0.0;
  double balance_loss = 0.0;
};

struct TrainResult {
  std::vector<HistoryRow> history;
  std::size_t best_epoch = 0;
  double best_val_acc = 0.0;
};

// Adam with L2 decay folded into the gradient and per-tag rate/decay.
class Adam {
 public:
  Adam(std::vector<ad::Param*> params, const TrainConfig& cfg);
  void step();

 private:
  std::vector<ad::Param*> params_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  double lr_[2];
  double wd_[2];
  std::size_t t_ = 0;
};

// Full-batch training with early stopping on validation accuracy (strict
// improvement, earliest maximum kept). On return the model holds the
// parameters of the best validation epoch. Throws RuntimeFailure on a
// non-finite loss.
TrainResult train(NodeMoe& model, const ModelInputs& in, const LabelVector& labels,
                  const Split& split, const TrainConfig& cfg);

struct EvalResult {
  double accuracy = 0.0;        // NaN on an empty index set
  std::vector<bool> correct;    // parallel to the index set
};

EvalResult evaluate_predictions(const std::vector<int>& predicted, const LabelVector& labels,
                                std::span<const std::size_t> indices);
EvalResult evaluate(NodeMoe& model, const ModelInputs& in, const LabelVector& labels,
                    std::span<const std::size_t> indices);

void write_history_csv(std::ostream& out, std::span<const HistoryRow> history);

}  // namespace nodemoe
