// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "nodemoe/common.hpp"
#include "nodemoe/format.hpp"

namespace nodemoe {
namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double quantile(std::vector<double> sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string bucket_label(double lo, double hi, bool last) {
  return "[" + format_double(lo) + "," + format_double(hi) + (last ? "]" : ")");
}

}  // namespace

double DensityTable::mode() const {
  if (density.empty()) return std::numeric_limits<double>::quiet_NaN();
  return centers[static_cast<std::size_t>(std::max_element(density.begin(), density.end()) -
                                          density.begin())];
}

double silverman_bandwidth(std::span<const double> values) {
  constexpr double kFallback = 1e-3;
  if (values.size() < 2) return kFallback;
  std::vector<double> v(values.begin(), values.end());
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / (n - 1.0));
  const double iqr = quantile(v, 0.75) - quantile(v, 0.25);
  double spread = sd;
  if (iqr > 0.0) spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) return kFallback;
  return 0.9 * spread * std::pow(n, -0.2);
}

DensityTable homophily_density(const Graph& g, const LabelVector& y, std::size_t bins) {
  require(bins >= 2, "homophily density needs at least 2 bins");
  const auto h = node_homophily(g, y);
  std::vector<double> vals;
  for (double v : h) {
    if (std::isfinite(v)) vals.push_back(v);
  }
  DensityTable t;
  t.nodes = vals.size();
  t.isolated = h.size() - vals.size();
  t.width = 1.0 / static_cast<double>(bins);
  t.bandwidth = silverman_bandwidth(vals);
  t.centers.resize(bins);
  t.density.assign(bins, 0.0);
  for (std::size_t b = 0; b < bins; ++b) t.centers[b] = (static_cast<double>(b) + 0.5) * t.width;
  if (vals.empty()) return t;

  double total = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double lo = static_cast<double>(b) * t.width;
    const double hi = lo + t.width;
    double mass = 0.0;
    for (double v : vals) {
      mass += normal_cdf((hi - v) / t.bandwidth) - normal_cdf((lo - v) / t.bandwidth);
    }
    t.density[b] = mass;
    total += mass;
  }
  for (double& d : t.density) d /= total * t.width;
  return t;
}

std::vector<CommunityRow> community_homophily(const Graph& g, const LabelVector& y,
                                              std::span<const std::size_t> community,
                                              std::size_t top_n) {
  require(community.size() == g.num_nodes(), "community assignment size != node count");
  require(y.size() == g.num_nodes(), "label count != node count");
  const std::size_t k =
      community.empty() ? 0 : *std::max_element(community.begin(), community.end()) + 1;
  std::vector<std::vector<std::size_t>> members(k);
  for (std::size_t v = 0; v < community.size(); ++v) members[community[v]].push_back(v);

  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < k; ++c) {
    if (!members[c].empty()) order.push_back(c);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return members[a].size() > members[b].size();
  });
  if (order.size() > top_n) order.resize(top_n);

  std::vector<CommunityRow> rows;
  for (std::size_t c : order) {
    const Graph sub = g.induced_subgraph(members[c]);
    LabelVector sy;
    sy.num_classes = y.num_classes;
    for (std::size_t v : members[c]) sy.labels.push_back(y.labels[v]);
    rows.push_back({c, members[c].size(), graph_homophily(node_homophily(sub, sy))});
  }
  return rows;
}

std::vector<CommunityRow> community_homophily(const Graph& g, const LabelVector& y,
                                              std::uint64_t seed, std::size_t top_n) {
  return community_homophily(g, y, detect_communities(g, seed), top_n);
}

std::size_t homophily_bucket(double h, std::size_t buckets) {
  const auto b = static_cast<std::size_t>(std::floor(std::clamp(h, 0.0, 1.0) *
                                                     static_cast<double>(buckets)));
  return std::min(b, buckets - 1);
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && values[idx[j + 1]] == values[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = r;
    i = j + 1;
  }
  return ranks;
}

double spearman(std::span<const double> a, std::span<const double> b) {
  require(a.size() == b.size(), "spearman: series lengths differ");
  if (a.size() < 2) return 0.0;
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(ra.begin(), ra.end(), 0.0) / n;
  const double mb = std::accumulate(rb.begin(), rb.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    sab += (ra[i] - ma) * (rb[i] - mb);
    saa += (ra[i] - ma) * (ra[i] - ma);
    sbb += (rb[i] - mb) * (rb[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

GateBucketTable gate_weight_by_homophily(const Matrix& gate, std::span<const double> homophily,
                                         std::size_t high_pass_expert, std::size_t buckets) {
  require(buckets >= 1, "need at least one bucket");
  require(gate.rows() == homophily.size(), "gate rows != node count");
  require(high_pass_expert < gate.cols(), "high-pass expert index out of range");
  const std::size_t m = gate.cols();
  std::vector<std::vector<double>> sums(buckets, std::vector<double>(m, 0.0));
  std::vector<std::size_t> counts(buckets, 0);
  GateBucketTable t;
  t.high_pass_expert = high_pass_expert;
  for (std::size_t i = 0; i < gate.rows(); ++i) {
    if (!std::isfinite(homophily[i])) {
      ++t.isolated;
      continue;
    }
    const std::size_t b = homophily_bucket(homophily[i], buckets);
    ++counts[b];
    for (std::size_t o = 0; o < m; ++o) sums[b][o] += gate(i, o);
  }
  std::vector<double> xs, ys;
  for (std::size_t b = 0; b < buckets; ++b) {
    if (counts[b] == 0) {
      t.empty_buckets.push_back(b);
      continue;
    }
    GateBucket row;
    row.index = b;
    row.lo = static_cast<double>(b) / static_cast<double>(buckets);
    row.hi = static_cast<double>(b + 1) / static_cast<double>(buckets);
    row.count = counts[b];
    for (std::size_t o = 0; o < m; ++o) {
      row.mean_weight.push_back(sums[b][o] / static_cast<double>(counts[b]));
    }
    xs.push_back(static_cast<double>(b));
    ys.push_back(row.mean_weight[high_pass_expert]);
    t.buckets.push_back(std::move(row));
  }
  t.spearman = spearman(xs, ys);
  return t;
}

std::size_t pick_high_pass(std::span<const FilterCoeffs> filters) {
  require(!filters.empty(), "no filters");
  const SmoothingGrid grid = SmoothingGrid::uniform();
  std::size_t best = 0;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t o = 0; o < filters.size(); ++o) {
    double low = 0.0, high = 0.0;
    std::size_t nl = 0, nh = 0;
    for (double x : grid.points) {
      const double r = frequency_response(filters[o], x);
      if (x < 1.0) {
        low += r;
        ++nl;
      } else if (x > 1.0) {
        high += r;
        ++nh;
      }
    }
    const double gap = high / static_cast<double>(nh) - low / static_cast<double>(nl);
    if (gap > best_gap) {
      best_gap = gap;
      best = o;
    }
  }
  return best;
}

std::vector<AccuracyBucket> accuracy_by_homophily(const std::vector<bool>& correct_a,
                                                  const std::vector<bool>& correct_b,
                                                  std::span<const double> homophily,
                                                  std::span<const std::size_t> indices,
                                                  std::size_t buckets) {
  require(buckets >= 1, "need at least one bucket");
  require(correct_a.size() == indices.size() && correct_b.size() == indices.size(),
          "correctness flags must be parallel to the index set");
  std::vector<std::size_t> count(buckets + 1, 0), hit_a(buckets + 1, 0), hit_b(buckets + 1, 0);
  for (std::size_t t = 0; t < indices.size(); ++t) {
    require(indices[t] < homophily.size(), "index out of range");
    const double h = homophily[indices[t]];
    const std::size_t b = std::isfinite(h) ? homophily_bucket(h, buckets) : buckets;
    ++count[b];
    hit_a[b] += correct_a[t] ? 1 : 0;
    hit_b[b] += correct_b[t] ? 1 : 0;
  }
  std::vector<AccuracyBucket> rows;
  for (std::size_t b = 0; b <= buckets; ++b) {
    if (count[b] == 0) continue;
    AccuracyBucket r;
    r.label = b == buckets ? "isolated"
                           : bucket_label(static_cast<double>(b) / static_cast<double>(buckets),
                                          static_cast<double>(b + 1) / static_cast<double>(buckets),
                                          b + 1 == buckets);
    r.count = count[b];
    r.acc_a = static_cast<double>(hit_a[b]) / static_cast<double>(count[b]);
    r.acc_b = static_cast<double>(hit_b[b]) / static_cast<double>(count[b]);
    r.delta = r.acc_a - r.acc_b;
    rows.push_back(std::move(r));
  }
  return rows;
}

Matrix filter_responses(std::span<const FilterCoeffs> filters, const SmoothingGrid& grid) {
  grid.validate();
  Matrix out(grid.points.size(), filters.size() + 1);
  for (std::size_t i = 0; i < grid.points.size(); ++i) {
    out(i, 0) = grid.points[i];
    for (std::size_t o = 0; o < filters.size(); ++o) {
      out(i, o + 1) = frequency_response(filters[o], grid.points[i]);
    }
  }
  return out;
}

void write_density_csv(std::ostream& out, const DensityTable& t) {
  out << "bin_center,density\n";
  for (std::size_t b = 0; b < t.centers.size(); ++b) {
    out << format_double(t.centers[b]) << ',' << format_double(t.density[b]) << '\n';
  }
}

void write_communities_csv(std::ostream& out, std::span<const CommunityRow> rows) {
  out << "rank,community,size,homophily\n";
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out << r + 1 << ',' << rows[r].community << ',' << rows[r].size << ','
        << format_double(rows[r].homophily) << '\n';
  }
}

void write_gate_buckets_csv(std::ostream& out, const GateBucketTable& t) {
  const std::size_t m = t.buckets.empty() ? 0 : t.buckets.front().mean_weight.size();
  out << "bucket,lo,hi,count";
  for (std::size_t o = 0; o < m; ++o) out << ",weight_expert_" << o;
  out << '\n';
  for (const auto& b : t.buckets) {
    out << b.index << ',' << format_double(b.lo) << ',' << format_double(b.hi) << ',' << b.count;
    for (double w : b.mean_weight) out << ',' << format_double(w);
    out << '\n';
  }
}

void write_accuracy_buckets_csv(std::ostream& out, std::span<const AccuracyBucket> rows) {
  out << "bucket,count,acc_a,acc_b,delta\n";
  for (const auto& r : rows) {
    out << '"' << r.label << "\"," << r.count << ',' << format_double(r.acc_a) << ','
        << format_double(r.acc_b) << ',' << format_double(r.delta) << '\n';
  }
}

void write_filters_csv(std::ostream& out, const Matrix& responses) {
  out << "lambda";
  for (std::size_t o = 0; o + 1 < responses.cols(); ++o) out << ",response_expert_" << o;
  out << '\n';
  for (std::size_t i = 0; i < responses.rows(); ++i) {
    for (std::size_t j = 0; j < responses.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(responses(i, j));
    }
    out << '\n';
  }
}

}  // namespace nodemoe
