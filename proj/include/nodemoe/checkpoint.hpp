// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "nodemoe/model.hpp"
#include "nodemoe/trainer.hpp"

namespace nodemoe {

// A checkpoint is one JSON document:
//
//   {
//     "format": "nodemoe-checkpoint", "version": 1,
//     "model":  { in_dim, num_classes, dropout, seed,
//                 experts: [{order, hidden, init, alpha}],
//                 gate: {mode, k, hidden, layers, epsilon} },
//     "train":  { max_epochs, patience, lr_filter, lr_network, wd_filter,
//                 wd_network, gamma, beta, seed },
//     "split":  { train: [...], val: [...], test: [...] },
//     "params": [{ name, tag, rows, cols, values: [...] }]
//   }
//
// Doubles are written in shortest round-trip form, so loading restores every
// parameter bit for bit.
struct Checkpoint {
  std::unique_ptr<NodeMoe> model;
  TrainConfig train;
  Split split;
};

void save_checkpoint(const std::filesystem::path& path, const NodeMoe& model,
                     const TrainConfig& train, const Split& split);
Checkpoint load_checkpoint(const std::filesystem::path& path);

std::string checkpoint_to_string(const NodeMoe& model, const TrainConfig& train,
                                 const Split& split);
Checkpoint checkpoint_from_string(const std::string& text);

}  // namespace nodemoe
