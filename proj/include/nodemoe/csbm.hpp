// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "nodemoe/graph.hpp"
#include "nodemoe/matrix.hpp"

namespace nodemoe {

// Structural pattern of a node in the mixed block model.
enum class Pattern : std::uint8_t { homophilic = 0, heterophilic = 1 };

// Two-class contextual stochastic block model whose nodes follow either a
// homophilic (p0 > q0) or heterophilic (p1 < q1) edge pattern. p is the
// same-class edge probability and q the cross-class one; p0 + q0 == p1 + q1
// keeps the degree distribution identical across patterns.
struct CsbmParams {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> mu;
  std::vector<double> nu;
  double p0 = 0.0;
  double q0 = 0.0;
  double p1 = 0.0;
  double q1 = 0.0;
  double homophilic_prob = 0.0;  // P
  std::uint64_t seed = 0;

  void validate() const;
};

struct CsbmSample {
  Graph graph;
  Matrix features;  // n x d
  LabelVector labels;
  std::vector<Pattern> pattern;
};

// mu = +s * 1/sqrt(d), nu = -s * 1/sqrt(d) with s = distance / 2, so that
// ||mu - nu|| == distance and mu + nu == 0.
std::pair<std::vector<double>, std::vector<double>> default_means(std::size_t d, double distance);

// n=2000, d=100, (p0,q0)=(0.05,0.01), (p1,q1)=(0.01,0.05), P=0.5, ||mu-nu||=1.
CsbmParams regime1_params(std::uint64_t seed);

// Pair (i, j), i < j, is drawn once with the probabilities of node i's
// pattern. Features are rounded to 9 significant digits, the precision they
// are stored with, so a saved sample reloads bit-exactly.
CsbmSample generate(const CsbmParams& params);

// (p mu + q nu) / (p + q) for class 0 and (q mu + p nu) / (p + q) for class 1,
// with (p, q) taken from the pattern.
std::vector<double> expected_filtered_mean(const CsbmParams& params, int cls, Pattern pattern);

// Rounds to the 9-significant-digit decimal used by the dataset files.
double canonical_feature(double x);

}  // namespace nodemoe
