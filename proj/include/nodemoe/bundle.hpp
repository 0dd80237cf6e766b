// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nodemoe/csbm.hpp"
#include "nodemoe/graph.hpp"
#include "nodemoe/matrix.hpp"
#include "nodemoe/trainer.hpp"

namespace nodemoe {

// On-disk dataset directory:
//
//   meta.json     {"name", "num_nodes", "feature_dim", "num_classes"}
//   edges.tsv     "src<TAB>dst" per line, 0-based
//   features.csv  num_nodes lines of feature_dim comma-separated decimals
//   labels.csv    one class id per line
//   splits.json   optional {"train": [...], "val": [...], "test": [...]}
//   pattern.csv   optional, one 0 (homophilic) / 1 (heterophilic) per line
//
// Blank lines are ignored in edges.tsv only.
struct DatasetMeta {
  std::string name;
  std::size_t num_nodes = 0;
  std::size_t feature_dim = 0;
  std::size_t num_classes = 0;
};

struct DatasetBundle {
  DatasetMeta meta;
  Graph graph;
  Matrix features;
  LabelVector labels;
  std::optional<Split> split;
  std::optional<std::vector<Pattern>> pattern;
  BuildStats edge_stats;  // filled by load_bundle

  void validate() const;
};

DatasetBundle bundle_from_sample(const CsbmSample& sample, std::string name);
// The pattern flags must be present.
CsbmSample sample_from_bundle(const DatasetBundle& bundle);

// Features are written with 9 significant digits.
void save_bundle(const DatasetBundle& bundle, const std::filesystem::path& dir);
DatasetBundle load_bundle(const std::filesystem::path& dir);

}  // namespace nodemoe
