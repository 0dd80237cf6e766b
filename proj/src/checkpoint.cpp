// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "nodemoe/common.hpp"

namespace nodemoe {
namespace {

using json = nlohmann::ordered_json;

constexpr const char* kFormat = "nodemoe-checkpoint";
constexpr int kVersion = 1;

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw ValidationError(std::string("checkpoint: missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("checkpoint: field '") + key + "': " + e.what());
  }
}

json model_json(const ModelConfig& c) {
  json experts = json::array();
  for (const auto& e : c.experts) {
    experts.push_back({{"order", e.order},
                       {"hidden", e.hidden},
                       {"init", std::string(to_string(e.init))},
                       {"alpha", e.alpha}});
  }
  return {{"in_dim", c.in_dim},
          {"num_classes", c.num_classes},
          {"dropout", c.dropout},
          {"seed", c.seed},
          {"experts", experts},
          {"gate",
           {{"mode", std::string(to_string(c.gate.mode))},
            {"k", c.gate.k},
            {"hidden", c.gate.hidden},
            {"layers", c.gate.layers},
            {"epsilon", c.gate.epsilon}}}};
}

ModelConfig model_from_json(const json& j) {
  ModelConfig c;
  c.in_dim = get<std::size_t>(j, "in_dim");
  c.num_classes = get<std::size_t>(j, "num_classes");
  c.dropout = get<double>(j, "dropout");
  c.seed = get<std::uint64_t>(j, "seed");
  for (const auto& e : get<json>(j, "experts")) {
    ExpertConfig ec;
    ec.order = get<std::size_t>(e, "order");
    ec.hidden = get<std::size_t>(e, "hidden");
    ec.init = parse_init_strategy(get<std::string>(e, "init"));
    ec.alpha = get<double>(e, "alpha");
    c.experts.push_back(ec);
  }
  const json g = get<json>(j, "gate");
  c.gate.mode = parse_gate_mode(get<std::string>(g, "mode"));
  c.gate.k = get<std::size_t>(g, "k");
  c.gate.hidden = get<std::size_t>(g, "hidden");
  c.gate.layers = get<std::size_t>(g, "layers");
  c.gate.epsilon = get<double>(g, "epsilon");
  return c;
}

json train_json(const TrainConfig& t) {
  return {{"max_epochs", t.max_epochs}, {"patience", t.patience},
          {"lr_filter", t.lr_filter},   {"lr_network", t.lr_network},
          {"wd_filter", t.wd_filter},   {"wd_network", t.wd_network},
          {"gamma", t.loss.gamma},      {"beta", t.loss.beta},
          {"seed", t.seed}};
}

TrainConfig train_from_json(const json& j) {
  TrainConfig t;
  t.max_epochs = get<std::size_t>(j, "max_epochs");
  t.patience = get<std::size_t>(j, "patience");
  t.lr_filter = get<double>(j, "lr_filter");
  t.lr_network = get<double>(j, "lr_network");
  t.wd_filter = get<double>(j, "wd_filter");
  t.wd_network = get<double>(j, "wd_network");
  t.loss.gamma = get<double>(j, "gamma");
  t.loss.beta = get<double>(j, "beta");
  t.seed = get<std::uint64_t>(j, "seed");
  return t;
}

}  // namespace

std::string checkpoint_to_string(const NodeMoe& model, const TrainConfig& train,
                                 const Split& split) {
  json params = json::array();
  for (const ad::Param* p : model.params()) {
    params.push_back({{"name", p->name},
                      {"tag", p->tag == ad::ParamTag::filter_coeff ? "filter_coeff" : "network_weight"},
                      {"rows", p->value.rows()},
                      {"cols", p->value.cols()},
                      {"values", std::vector<double>(p->value.values().begin(),
                                                     p->value.values().end())}});
  }
  json doc = {{"format", kFormat},
              {"version", kVersion},
              {"model", model_json(model.config())},
              {"train", train_json(train)},
              {"split", {{"train", split.train}, {"val", split.val}, {"test", split.test}}},
              {"params", params}};
  return doc.dump(1) + "\n";
}

Checkpoint checkpoint_from_string(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("checkpoint: malformed JSON: ") + e.what());
  }
  require(doc.is_object() && doc.value("format", "") == kFormat,
          "checkpoint: not a nodemoe checkpoint");
  require(get<int>(doc, "version") == kVersion, "checkpoint: unsupported version");

  Checkpoint ck;
  ck.model = std::make_unique<NodeMoe>(model_from_json(get<json>(doc, "model")));
  ck.train = train_from_json(get<json>(doc, "train"));
  const json s = get<json>(doc, "split");
  ck.split.train = get<std::vector<std::size_t>>(s, "train");
  ck.split.val = get<std::vector<std::size_t>>(s, "val");
  ck.split.test = get<std::vector<std::size_t>>(s, "test");

  const json params = get<json>(doc, "params");
  auto dst = ck.model->params();
  require(params.size() == dst.size(),
          "checkpoint: " + std::to_string(params.size()) + " parameters, model expects " +
              std::to_string(dst.size()));
  for (std::size_t i = 0; i < dst.size(); ++i) {
    const json& p = params[i];
    const auto name = get<std::string>(p, "name");
    const auto rows = get<std::size_t>(p, "rows");
    const auto cols = get<std::size_t>(p, "cols");
    auto values = get<std::vector<double>>(p, "values");
    require(name == dst[i]->name, "checkpoint: expected parameter '" + dst[i]->name +
                                      "', found '" + name + "'");
    require(rows == dst[i]->value.rows() && cols == dst[i]->value.cols() &&
                values.size() == rows * cols,
            "checkpoint: parameter '" + name + "' has the wrong shape");
    dst[i]->value = Matrix(rows, cols, std::move(values));
    dst[i]->zero_grad();
  }
  return ck;
}

void save_checkpoint(const std::filesystem::path& path, const NodeMoe& model,
                     const TrainConfig& train, const Split& split) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write checkpoint " + path.string());
  out << checkpoint_to_string(model, train, split);
  if (!out) throw RuntimeFailure("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open checkpoint " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return checkpoint_from_string(ss.str());
}

}  // namespace nodemoe
