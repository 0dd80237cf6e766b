// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

// Community detection by asynchronous label propagation.
//
// Each sweep visits the nodes in a seeded random order and moves every node to
// the label carried by most of its neighbors; ties go to the lowest label id.
// A sweep with no change ends the run, and runs are capped at kMaxSweeps.
//
// A single run can let one clique absorb a neighboring one when the bridge
// endpoint is visited first (all neighbor labels tie at count 1 and the bridge
// neighbor may hold the lowest id). We therefore run a few seeded restarts and
// keep the partition with the highest modularity.

#include <algorithm>
#include <numeric>
#include <random>

#include "nodemoe/graph.hpp"

namespace nodemoe {
namespace {

constexpr int kMaxSweeps = 100;
constexpr int kRestarts = 5;

std::vector<std::size_t> propagate_labels(const Graph& g, std::mt19937_64& rng) {
  const std::size_t n = g.num_nodes();
  std::vector<std::size_t> label(n);
  std::iota(label.begin(), label.end(), std::size_t{0});
  std::vector<std::size_t> order(label);
  std::vector<std::size_t> count(n, 0);
  std::vector<std::size_t> touched;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    std::shuffle(order.begin(), order.end(), rng);
    bool changed = false;
    for (std::size_t v : order) {
      const auto nb = g.neighbors(v);
      if (nb.empty()) continue;
      touched.clear();
      for (std::size_t u : nb) {
        if (count[label[u]]++ == 0) touched.push_back(label[u]);
      }
      std::size_t best = label[v];
      std::size_t best_count = 0;
      for (std::size_t l : touched) {
        if (count[l] > best_count || (count[l] == best_count && l < best)) {
          best = l;
          best_count = count[l];
        }
      }
      for (std::size_t l : touched) count[l] = 0;
      if (best != label[v]) {
        label[v] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return label;
}

std::vector<std::size_t> canonical_ids(std::span<const std::size_t> label) {
  std::vector<std::size_t> remap(label.size(), label.size());
  std::vector<std::size_t> out(label.size());
  std::size_t next = 0;
  for (std::size_t v = 0; v < label.size(); ++v) {
    if (remap[label[v]] == label.size()) remap[label[v]] = next++;
    out[v] = remap[label[v]];
  }
  return out;
}

}  // namespace

double modularity(const Graph& g, std::span<const std::size_t> community) {
  const double m = static_cast<double>(g.num_edges());
  if (m == 0) return 0.0;
  const std::size_t k = community.empty()
                            ? 0
                            : *std::max_element(community.begin(), community.end()) + 1;
  std::vector<double> internal(k, 0.0);
  std::vector<double> degree_sum(k, 0.0);
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    degree_sum[community[v]] += static_cast<double>(g.degree(v));
    for (std::size_t u : g.neighbors(v)) {
      if (community[u] == community[v]) internal[community[v]] += 0.5;
    }
  }
  double q = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    const double frac = degree_sum[c] / (2.0 * m);
    q += internal[c] / m - frac * frac;
  }
  return q;
}

std::vector<std::size_t> detect_communities(const Graph& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> best;
  double best_q = 0.0;
  for (int r = 0; r < kRestarts; ++r) {
    auto ids = canonical_ids(propagate_labels(g, rng));
    const double q = modularity(g, ids);
    if (best.empty() || q > best_q) {
      best = std::move(ids);
      best_q = q;
    }
  }
  return best;
}

}  // namespace nodemoe
