// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nodemoe/csbm.hpp"
#include "nodemoe/matrix.hpp"

namespace nodemoe {

struct LogisticFit {
  std::vector<double> w;
  double b = 0.0;
};

struct LogisticOptions {
  std::size_t steps = 500;
  double rate = 0.1;
};

// Mean binary cross-entropy minimized by projected gradient descent from
// w = 0, b = 0; after every step w is projected onto the ball ||w|| <= radius
// (b is unconstrained). Fits on `rows` only, or on every row when empty.
LogisticFit fit_bounded_logistic(const Matrix& x, std::span<const int> y, double radius,
                                 std::span<const std::size_t> rows = {},
                                 const LogisticOptions& opt = {});

// Mean of log(1 + exp(-(2y - 1)(w.x + b))) over `rows`.
double logistic_bce(const LogisticFit& fit, const Matrix& x, std::span<const int> y,
                    std::span<const std::size_t> rows);
// Fraction of rows with sign(w.x + b) matching the label (w.x + b > 0 means 1).
double logistic_accuracy(const LogisticFit& fit, const Matrix& x, std::span<const int> y,
                         std::span<const std::size_t> rows);

// R (q1 - p1) / (2 (q1 + p1)) ||mu - nu||
double separability_bound(const CsbmParams& params, double radius);

// Notes on parameters far from the asymptotic regime; empty when none apply.
std::vector<std::string> regime_warnings(const CsbmParams& params);

struct SeparabilityReport {
  CsbmParams params;
  double radius = 0.0;
  LogisticFit fit;
  std::size_t h0_count = 0;
  std::size_t h1_count = 0;
  double h0_acc = 0.0;   // part 1 only
  double h1_acc = 0.0;   // part 1 only; NaN when H1 is empty
  double h1_bce = 0.0;   // part 1 only; NaN when H1 is empty
  double all_acc = 0.0;  // accuracy over every node
  double bound = 0.0;
  std::vector<std::string> flags;
};

// Row-normalized low-pass filter on every node, classifier fit on H0 only.
SeparabilityReport validate_part1(const CsbmSample& sample, const CsbmParams& params,
                                  double radius);
// Low-pass on H0 rows, its negation on H1 rows, classifier fit on every node.
SeparabilityReport validate_part2(const CsbmSample& sample, const CsbmParams& params,
                                  double radius);

// D^-1 A X, with rows of heterophilic nodes negated when `node_wise`.
Matrix filtered_features(const CsbmSample& sample, bool node_wise);

struct MeanCheck {
  int cls = 0;
  Pattern pattern = Pattern::homophilic;
  std::size_t count = 0;
  double max_abs_dev = 0.0;
  double tolerance = 0.0;  // 5 / sqrt(count * d)
  bool pass = false;
};

// Empirical mean of the filtered rows per (class, pattern) against
// expected_filtered_mean; with `node_wise` the H1 expectation is negated.
// Empty groups are skipped.
std::vector<MeanCheck> filtered_mean_check(const CsbmSample& sample, const CsbmParams& params,
                                           bool node_wise = false);

struct TheoremRow {
  std::uint64_t seed = 0;
  double h0_acc = 0.0;
  double h1_acc = 0.0;
  double h1_bce = 0.0;
  double bound = 0.0;
  double part2_acc = 0.0;
  double part1_all_acc = 0.0;
  std::vector<std::string> flags;
};

// One generated sample per seed (params.seed replaced by first_seed + i).
std::vector<TheoremRow> run_theorem_validation(const CsbmParams& params, double radius,
                                               std::uint64_t first_seed, std::size_t seeds);

void write_theorem_csv(std::ostream& out, std::span<const TheoremRow> rows);

}  // namespace nodemoe
