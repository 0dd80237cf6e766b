// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

#include "nodemoe/common.hpp"
#include "nodemoe/format.hpp"

namespace nodemoe {

void SplitFractions::validate() const {
  require(train > 0.0 && val >= 0.0 && test >= 0.0, "split fractions must be nonnegative");
  require(std::abs(train + val + test - 1.0) <= 1e-9, "split fractions must sum to 1");
}

const std::vector<std::size_t>& Split::part(std::string_view name) const {
  if (name == "train") return train;
  if (name == "val") return val;
  if (name == "test") return test;
  throw ValidationError("unknown split part '" + std::string(name) +
                        "' (expected train, val or test)");
}

void Split::validate(std::size_t n) const {
  std::vector<char> seen(n, 0);
  for (const auto* part : {&train, &val, &test}) {
    for (std::size_t i : *part) {
      require(i < n, "split index " + std::to_string(i) + " out of range");
      require(!seen[i], "node " + std::to_string(i) + " appears twice in the split");
      seen[i] = 1;
    }
  }
  require(train.size() + val.size() + test.size() == n, "split does not cover every node");
}

Split make_split(const LabelVector& labels, const SplitFractions& fractions, std::uint64_t seed,
                 std::vector<std::string>* warnings) {
  fractions.validate();
  const std::size_t n = labels.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  const auto n_train = static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions.train));
  const auto n_val = std::min(
      n - n_train, static_cast<std::size_t>(std::llround(static_cast<double>(n) * fractions.val)));
  Split s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
               perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());

  if (warnings != nullptr && labels.num_classes > 0) {
    std::vector<std::size_t> count(static_cast<std::size_t>(labels.num_classes), 0);
    for (std::size_t i : s.train) ++count[static_cast<std::size_t>(labels.labels[i])];
    for (std::size_t c = 0; c < count.size(); ++c) {
      if (count[c] == 0) warnings->push_back("class " + std::to_string(c) + " has no training node");
    }
  }
  return s;
}

void TrainConfig::validate() const {
  require(max_epochs >= 1, "max_epochs must be >= 1");
  require(patience <= max_epochs, "patience must not exceed max_epochs");
  require(lr_filter >= 0.0 && lr_network >= 0.0, "learning rates must be >= 0");
  require(wd_filter >= 0.0 && wd_network >= 0.0, "weight decays must be >= 0");
  loss.validate();
}

Adam::Adam(std::vector<ad::Param*> params, const TrainConfig& cfg)
    : params_(std::move(params)),
      lr_{cfg.lr_filter, cfg.lr_network},
      wd_{cfg.wd_filter, cfg.wd_network} {
  for (const ad::Param* p : params_) {
    m_.emplace_back(p->value.rows(), p->value.cols());
    v_.emplace_back(p->value.rows(), p->value.cols());
  }
}

void Adam::step() {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++t_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    ad::Param& p = *params_[i];
    const int group = p.tag == ad::ParamTag::filter_coeff ? 0 : 1;
    const double lr = lr_[group];
    const double wd = wd_[group];
    if (!p.grad.same_shape(p.value)) p.zero_grad();
    double* w = p.value.data();
    const double* g = p.grad.data();
    double* m = m_[i].data();
    double* v = v_[i].data();
    for (std::size_t j = 0; j < p.value.size(); ++j) {
      const double gj = g[j] + wd * w[j];
      m[j] = kBeta1 * m[j] + (1.0 - kBeta1) * gj;
      v[j] = kBeta2 * v[j] + (1.0 - kBeta2) * gj * gj;
      if (lr != 0.0) w[j] -= lr * (m[j] / c1) / (std::sqrt(v[j] / c2) + kEps);
    }
  }
}

EvalResult evaluate_predictions(const std::vector<int>& predicted, const LabelVector& labels,
                                std::span<const std::size_t> indices) {
  EvalResult r;
  r.correct.reserve(indices.size());
  std::size_t hits = 0;
  for (std::size_t i : indices) {
    require(i < predicted.size() && i < labels.size(), "evaluation index out of range");
    const bool ok = predicted[i] == labels.labels[i];
    r.correct.push_back(ok);
    hits += ok ? 1 : 0;
  }
  r.accuracy = indices.empty() ? std::numeric_limits<double>::quiet_NaN()
                               : static_cast<double>(hits) / static_cast<double>(indices.size());
  return r;
}

EvalResult evaluate(NodeMoe& model, const ModelInputs& in, const LabelVector& labels,
                    std::span<const std::size_t> indices) {
  return evaluate_predictions(argmax_rows(model.predict(in)), labels, indices);
}

TrainResult train(NodeMoe& model, const ModelInputs& in, const LabelVector& labels,
                  const Split& split, const TrainConfig& cfg) {
  cfg.validate();
  split.validate(labels.size());
  require(!split.train.empty(), "training split is empty");
  require(in.features.rows() == labels.size(), "feature rows do not match label count");

  auto params = model.params();
  Adam opt(params, cfg);
  std::mt19937_64 rng(cfg.seed);

  TrainResult result;
  result.best_val_acc = -1.0;
  std::vector<Matrix> best;
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    for (ad::Param* p : params) p->zero_grad();
    ad::Tape tape;
    const auto fwd = model.forward(tape, in, &rng);
    const auto parts = model.loss(tape, fwd, labels, split.train, cfg.loss);
    const double total = parts.total.value()(0, 0);
    if (!std::isfinite(total)) {
      throw RuntimeFailure("training diverged at epoch " + std::to_string(epoch) +
                           ": loss is " + format_double(total) + " (task " +
                           format_double(parts.task) + ", smoothing " +
                           format_double(parts.smoothing) + ", balance " +
                           format_double(parts.balance) + ")");
    }
    tape.backward(parts.total);
    opt.step();

    const auto pred = argmax_rows(model.predict(in));
    HistoryRow row;
    row.epoch = epoch;
    row.train_loss = total;
    row.train_acc = evaluate_predictions(pred, labels, split.train).accuracy;
    row.val_acc = split.val.empty() ? row.train_acc
                                    : evaluate_predictions(pred, labels, split.val).accuracy;
    // Filter terms describe the parameters after this step.
    double smooth = 0.0;
    const SmoothingGrid grid = SmoothingGrid::uniform();
    for (const auto& f : model.filters()) smooth += smoothing_loss(f, grid);
    row.smoothing_loss = smooth;
    row.balance_loss = parts.balance;
    result.history.push_back(row);

    if (row.val_acc > result.best_val_acc) {
      result.best_val_acc = row.val_acc;
      result.best_epoch = epoch;
      best.clear();
      for (const ad::Param* p : params) best.push_back(p->value);
      since_best = 0;
    } else if (++since_best >= cfg.patience && cfg.patience > 0) {
      break;
    }
  }
  for (std::size_t i = 0; i < params.size(); ++i) params[i]->value = best[i];
  return result;
}

void write_history_csv(std::ostream& out, std::span<const HistoryRow> history) {
  out << "epoch,train_loss,train_acc,val_acc,smoothing_loss,balance_loss\n";
  for (const auto& r : history) {
    out << r.epoch << ',' << format_double(r.train_loss) << ',' << format_double(r.train_acc)
        << ',' << format_double(r.val_acc) << ',' << format_double(r.smoothing_loss) << ','
        << format_double(r.balance_loss) << '\n';
  }
}

}  // namespace nodemoe
