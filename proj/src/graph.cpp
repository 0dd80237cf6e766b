// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nodemoe/common.hpp"
#include "nodemoe/simd/kernels.hpp"

namespace nodemoe {

Graph Graph::build(std::span<const Edge> edges, std::size_t num_nodes, BuildStats* stats) {
  require(num_nodes > 0, "graph must have at least one node");
  BuildStats local;
  local.input_edges = edges.size();

  std::vector<Edge> directed;
  directed.reserve(edges.size() * 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const auto [u, v] = edges[i];
    if (u >= num_nodes || v >= num_nodes) {
      throw ValidationError("edge " + std::to_string(i) + " (" + std::to_string(u) + ", " +
                            std::to_string(v) + ") has an endpoint >= num_nodes " +
                            std::to_string(num_nodes));
    }
    if (u == v) {
      ++local.self_loops_dropped;
      continue;
    }
    directed.emplace_back(u, v);
    directed.emplace_back(v, u);
  }
  std::sort(directed.begin(), directed.end());
  const auto last = std::unique(directed.begin(), directed.end());
  local.duplicates_dropped = static_cast<std::size_t>(directed.end() - last) / 2;
  directed.erase(last, directed.end());

  auto storage = std::make_shared<Storage>();
  storage->offsets.assign(num_nodes + 1, 0);
  storage->degrees.assign(num_nodes, 0);
  storage->targets.reserve(directed.size());
  for (const auto& [u, v] : directed) {
    ++storage->degrees[u];
    storage->targets.push_back(v);
  }
  for (std::size_t i = 0; i < num_nodes; ++i) {
    storage->offsets[i + 1] = storage->offsets[i] + storage->degrees[i];
  }

  if (stats != nullptr) *stats = local;
  Graph g;
  g.storage_ = std::move(storage);
  return g;
}

bool Graph::has_edge(std::size_t u, std::size_t v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edge_list() const {
  std::vector<Edge> out;
  out.reserve(num_edges());
  for (std::size_t u = 0; u < num_nodes(); ++u) {
    for (std::size_t v : neighbors(u)) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

Graph Graph::induced_subgraph(std::span<const std::size_t> nodes) const {
  constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> local(num_nodes(), kAbsent);
  for (std::size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = i;
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (std::size_t v : neighbors(nodes[i])) {
      if (local[v] != kAbsent && i < local[v]) edges.emplace_back(i, local[v]);
    }
  }
  return build(edges, nodes.size());
}

Graph build_graph(std::span<const Edge> edges, std::size_t num_nodes) {
  return Graph::build(edges, num_nodes);
}

NormalizedOperator::NormalizedOperator(Graph graph, OperatorKind kind)
    : graph_(std::move(graph)), kind_(kind) {
  const std::size_t n = graph_.num_nodes();
  require(n > 0, "operator requires a non-empty graph");
  std::vector<double> inv_sqrt(n, 0.0);
  std::vector<double> inv(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = static_cast<double>(graph_.degree(i));
    if (d > 0) {
      inv_sqrt[i] = 1.0 / std::sqrt(d);
      inv[i] = 1.0 / d;
    }
  }

  const auto offsets = graph_.offsets();
  const auto targets = graph_.targets();
  values_.resize(targets.size());
  values_transposed_.resize(targets.size());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) {
      const std::size_t j = targets[e];
      double v = 0.0;
      double vt = 0.0;
      switch (kind_) {
        case OperatorKind::sym_adj:
          v = vt = inv_sqrt[i] * inv_sqrt[j];
          break;
        case OperatorKind::sym_laplacian:
        case OperatorKind::shifted_laplacian:
          v = vt = -inv_sqrt[i] * inv_sqrt[j];
          break;
        case OperatorKind::row_adj:
          v = inv[i];
          vt = inv[j];
          break;
        case OperatorKind::adjacency:
          v = vt = 1.0;
          break;
      }
      values_[e] = v;
      values_transposed_[e] = vt;
    }
  }

  if (kind_ == OperatorKind::sym_laplacian) {
    diag_.assign(n, 1.0);
  } else if (kind_ == OperatorKind::shifted_laplacian) {
    diag_.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (graph_.degree(i) == 0) diag_[i] = -1.0;
    }
  }
}

Matrix NormalizedOperator::apply_with(const std::vector<double>& values, const Matrix& x) const {
  const std::size_t n = graph_.num_nodes();
  if (x.rows() != n) {
    throw ValidationError("operator applied to " + std::to_string(x.rows()) +
                          " rows, graph has " + std::to_string(n) + " nodes");
  }
  Matrix y(n, x.cols());
  if (x.cols() == 0) return y;
  simd::CsrView view;
  view.rows = n;
  view.offsets = graph_.offsets().data();
  view.targets = graph_.targets().data();
  view.values = values.data();
  view.diag = diag_.empty() ? nullptr : diag_.data();
  simd::active().spmm(view, x.data(), y.data(), x.cols());
  return y;
}

Matrix NormalizedOperator::apply(const Matrix& x) const { return apply_with(values_, x); }

Matrix NormalizedOperator::apply_transpose(const Matrix& x) const {
  return apply_with(values_transposed_, x);
}

Matrix NormalizedOperator::dense() const {
  const std::size_t n = graph_.num_nodes();
  Matrix m(n, n);
  const auto offsets = graph_.offsets();
  const auto targets = graph_.targets();
  for (std::size_t i = 0; i < n; ++i) {
    if (!diag_.empty()) m(i, i) = diag_[i];
    for (std::size_t e = offsets[i]; e < offsets[i + 1]; ++e) m(i, targets[e]) += values_[e];
  }
  return m;
}

Matrix apply_operator(const NormalizedOperator& op, const Matrix& x) { return op.apply(x); }

void LabelVector::validate() const {
  require(num_classes >= 2, "label vector needs at least 2 classes");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw ValidationError("label of node " + std::to_string(i) + " is " +
                            std::to_string(labels[i]) + ", outside [0, " +
                            std::to_string(num_classes) + ")");
    }
  }
}

std::vector<double> node_homophily(const Graph& g, const LabelVector& y) {
  require(y.size() == g.num_nodes(), "label count does not match node count");
  std::vector<double> h(g.num_nodes(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t v = 0; v < g.num_nodes(); ++v) {
    const auto nb = g.neighbors(v);
    if (nb.empty()) continue;
    std::size_t same = 0;
    for (std::size_t u : nb) same += y.labels[u] == y.labels[v] ? 1 : 0;
    h[v] = static_cast<double>(same) / static_cast<double>(nb.size());
  }
  return h;
}

double graph_homophily(std::span<const double> node_values) {
  double sum = 0.0;
  std::size_t count = 0;
  for (double v : node_values) {
    if (std::isfinite(v)) {
      sum += v;
      ++count;
    }
  }
  return count == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(count);
}

}  // namespace nodemoe
