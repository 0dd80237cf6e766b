// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "nodemoe/matrix.hpp"

namespace nodemoe {

using Edge = std::pair<std::size_t, std::size_t>;

struct BuildStats {
  std::size_t input_edges = 0;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

// Immutable simple undirected graph in CSR form. Both directions of every edge
// are stored, targets are sorted per row, and there are no self-loops or
// duplicates. Copies share storage.
class Graph {
 public:
  Graph() = default;

  static Graph build(std::span<const Edge> edges, std::size_t num_nodes,
                     BuildStats* stats = nullptr);

  std::size_t num_nodes() const { return storage_ ? storage_->degrees.size() : 0; }
  // Undirected edge count.
  std::size_t num_edges() const { return storage_ ? storage_->targets.size() / 2 : 0; }

  std::span<const std::size_t> offsets() const { return storage_->offsets; }
  std::span<const std::size_t> targets() const { return storage_->targets; }
  std::span<const std::size_t> degrees() const { return storage_->degrees; }
  std::size_t degree(std::size_t v) const { return storage_->degrees[v]; }
  std::span<const std::size_t> neighbors(std::size_t v) const {
    return std::span<const std::size_t>(storage_->targets)
        .subspan(storage_->offsets[v], storage_->degrees[v]);
  }
  bool has_edge(std::size_t u, std::size_t v) const;

  // Each undirected edge once as (lo, hi), sorted.
  std::vector<Edge> edge_list() const;

  // Subgraph on `nodes` (relabelled 0..k-1 in the given order).
  Graph induced_subgraph(std::span<const std::size_t> nodes) const;

 private:
  struct Storage {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> targets;
    std::vector<std::size_t> degrees;
  };
  std::shared_ptr<const Storage> storage_;
};

Graph build_graph(std::span<const Edge> edges, std::size_t num_nodes);

enum class OperatorKind {
  sym_adj,            // D^-1/2 A D^-1/2
  row_adj,            // D^-1 A
  sym_laplacian,      // I - D^-1/2 A D^-1/2
  shifted_laplacian,  // L - I with lambda_max fixed at 2, i.e. -D^-1/2 A D^-1/2
  adjacency,          // A (unnormalized neighbor sum)
};

// Sparse operator over a graph. Zero-degree nodes use D^-1/2 = 0, so their
// rows are 0 for the adjacency kinds, x_i for sym_laplacian and -x_i for
// shifted_laplacian (an isolated node is a zero-frequency component).
class NormalizedOperator {
 public:
  NormalizedOperator(Graph graph, OperatorKind kind);

  OperatorKind kind() const { return kind_; }
  const Graph& graph() const { return graph_; }
  bool self_adjoint() const { return kind_ != OperatorKind::row_adj; }

  Matrix apply(const Matrix& x) const;
  Matrix apply_transpose(const Matrix& x) const;
  // Dense n x n matrix of the operator; for tests and small-graph analysis.
  Matrix dense() const;

 private:
  Matrix apply_with(const std::vector<double>& values, const Matrix& x) const;

  Graph graph_;
  OperatorKind kind_;
  std::vector<double> values_;
  std::vector<double> values_transposed_;
  std::vector<double> diag_;
};

Matrix apply_operator(const NormalizedOperator& op, const Matrix& x);

struct LabelVector {
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
  void validate() const;
};

// h(v) = fraction of v's neighbors sharing its label; NaN for degree-0 nodes.
std::vector<double> node_homophily(const Graph& g, const LabelVector& y);
// Mean of the finite entries; NaN when there are none.
double graph_homophily(std::span<const double> node_values);

// Asynchronous label propagation (see community.cpp). Community ids are
// canonical: numbered by first appearance in node order.
std::vector<std::size_t> detect_communities(const Graph& g, std::uint64_t seed);
double modularity(const Graph& g, std::span<const std::size_t> community);

}  // namespace nodemoe
