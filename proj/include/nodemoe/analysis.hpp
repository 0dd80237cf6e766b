// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "nodemoe/graph.hpp"
#include "nodemoe/matrix.hpp"
#include "nodemoe/spectral.hpp"

namespace nodemoe {

// Gaussian KDE of node homophily over [0, 1], reported as per-bin density.
// Each bin holds the kernel mass falling inside it; masses are renormalized
// over [0, 1] so that sum(density * width) == 1.
struct DensityTable {
  std::vector<double> centers;
  std::vector<double> density;
  double width = 0.0;
  double bandwidth = 0.0;
  std::size_t nodes = 0;     // nodes with degree > 0
  std::size_t isolated = 0;  // excluded

  double mode() const;
};

DensityTable homophily_density(const Graph& g, const LabelVector& y, std::size_t bins = 50);
// Silverman's rule, 0.9 * min(sd, IQR / 1.34) * n^(-1/5) on values clipped to
// [0, 1]; 1e-3 when the values have no spread.
double silverman_bandwidth(std::span<const double> values);

struct CommunityRow {
  std::size_t community = 0;
  std::size_t size = 0;
  double homophily = 0.0;  // NaN when the induced subgraph has no edges
};

// Largest `top_n` communities by size (ties by id), homophily measured on the
// induced subgraph of each.
std::vector<CommunityRow> community_homophily(const Graph& g, const LabelVector& y,
                                              std::span<const std::size_t> community,
                                              std::size_t top_n = 10);
std::vector<CommunityRow> community_homophily(const Graph& g, const LabelVector& y,
                                              std::uint64_t seed, std::size_t top_n = 10);

// Equal-width bucket of h in [0, 1] among `buckets`.
std::size_t homophily_bucket(double h, std::size_t buckets);

// Average ranks (1-based, ties share the mean rank). Spearman correlation is
// the Pearson correlation of ranks; 0 when either series is constant.
std::vector<double> average_ranks(std::span<const double> values);
double spearman(std::span<const double> a, std::span<const double> b);

struct GateBucket {
  std::size_t index = 0;
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  std::vector<double> mean_weight;  // per expert
};

struct GateBucketTable {
  std::vector<GateBucket> buckets;        // non-empty buckets only
  std::vector<std::size_t> empty_buckets; // omitted, by index
  std::size_t isolated = 0;
  std::size_t high_pass_expert = 0;
  double spearman = 0.0;  // bucket index vs. mean high-pass weight
};

GateBucketTable gate_weight_by_homophily(const Matrix& gate, std::span<const double> homophily,
                                         std::size_t high_pass_expert, std::size_t buckets = 5);

// Expert whose response rises most from the lower half of the spectrum to the
// upper half.
std::size_t pick_high_pass(std::span<const FilterCoeffs> filters);

struct AccuracyBucket {
  std::string label;  // "[lo,hi)" or "isolated"
  std::size_t count = 0;
  double acc_a = 0.0;
  double acc_b = 0.0;
  double delta = 0.0;  // acc_a - acc_b
};

// Buckets the evaluated nodes by homophily. Degree-0 nodes form their own
// "isolated" row so that the rows partition `indices`.
std::vector<AccuracyBucket> accuracy_by_homophily(const std::vector<bool>& correct_a,
                                                  const std::vector<bool>& correct_b,
                                                  std::span<const double> homophily,
                                                  std::span<const std::size_t> indices,
                                                  std::size_t buckets = 5);

// Rows (lambda, response_expert_0, ...) on the grid.
Matrix filter_responses(std::span<const FilterCoeffs> filters, const SmoothingGrid& grid);

void write_density_csv(std::ostream& out, const DensityTable& t);
void write_communities_csv(std::ostream& out, std::span<const CommunityRow> rows);
void write_gate_buckets_csv(std::ostream& out, const GateBucketTable& t);
void write_accuracy_buckets_csv(std::ostream& out, std::span<const AccuracyBucket> rows);
void write_filters_csv(std::ostream& out, const Matrix& responses);

}  // namespace nodemoe
