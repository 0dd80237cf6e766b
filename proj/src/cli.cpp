// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "nodemoe/analysis.hpp"
#include "nodemoe/bundle.hpp"
#include "nodemoe/checkpoint.hpp"
#include "nodemoe/common.hpp"
#include "nodemoe/csbm.hpp"
#include "nodemoe/format.hpp"
#include "nodemoe/model.hpp"
#include "nodemoe/svg.hpp"
#include "nodemoe/theory.hpp"
#include "nodemoe/trainer.hpp"

namespace nodemoe {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::ofstream open_output(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  return out;
}

void print_config(std::ostream& out, const std::string& command, const json& cfg) {
  json doc = {{"command", command}, {"config", cfg}};
  out << "config: " << doc.dump() << '\n';
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

json params_json(const CsbmParams& p, double dist) {
  return {{"n", p.n},   {"d", p.d},   {"p0", p.p0},
          {"q0", p.q0}, {"p1", p.p1}, {"q1", p.q1},
          {"P", p.homophilic_prob},   {"mu_nu_dist", dist}, {"seed", p.seed}};
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::size_t n = 2000;
  std::size_t d = 100;
  double p0 = 0.05, q0 = 0.01, p1 = 0.01, q1 = 0.05;
  double P = 0.5;
  double dist = 1.0;
  std::uint64_t seed = 0;
  std::string name = "csbm";
  std::string out;
};

int run_generate(const GenerateArgs& a, std::ostream& out) {
  CsbmParams p;
  p.n = a.n;
  p.d = a.d;
  p.p0 = a.p0;
  p.q0 = a.q0;
  p.p1 = a.p1;
  p.q1 = a.q1;
  p.homophilic_prob = a.P;
  p.seed = a.seed;
  require(a.dist >= 0.0, "--mu-nu-dist must be >= 0");
  std::tie(p.mu, p.nu) = default_means(a.d, a.dist);
  json cfg = params_json(p, a.dist);
  cfg["name"] = a.name;
  cfg["out"] = a.out;
  print_config(out, "generate", cfg);
  p.validate();
  const CsbmSample s = generate(p);
  save_bundle(bundle_from_sample(s, a.name), a.out);
  out << "wrote " << a.out << ": " << s.graph.num_nodes() << " nodes, " << s.graph.num_edges()
      << " edges\n";
  return kExitOk;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string data;
  std::size_t experts = 2;
  std::size_t order = 10;
  std::string init;
  double alpha = 0.5;
  double gamma = 0.0;
  double beta = 0.01;
  std::string mode = "soft";
  std::optional<std::size_t> k;
  std::uint64_t seed = 0;
  std::size_t repeats = 1;
  std::string out;
  std::size_t epochs = 1000;
  std::size_t patience = 100;
  double lr = 0.01;
  double lr_filter = 0.01;
  double wd = 0.0005;
  double wd_filter = 0.0005;
  double dropout = 0.5;
  std::size_t hidden = 64;
  std::size_t gate_hidden = 64;
  double epsilon = 0.0;
  std::string history;
};

int run_train(const TrainArgs& a, std::ostream& out) {
  require(a.experts >= 1, "--experts must be >= 1");
  require(a.repeats >= 1, "--repeats must be >= 1");
  const GateMode mode = parse_gate_mode(a.mode);
  if (mode == GateMode::soft && a.k) throw ValidationError("--k is only valid with --mode topk");
  const std::size_t k = mode == GateMode::topk ? a.k.value_or(1) : 0;
  if (mode == GateMode::topk) {
    require(a.experts >= 2, "--mode topk needs at least 2 experts");
    require(k >= 1 && k <= a.experts, "--k must lie in [1, --experts]");
  }

  std::vector<InitStrategy> inits;
  if (a.init.empty()) {
    inits = default_inits(a.experts);
  } else {
    for (const auto& s : split_list(a.init)) inits.push_back(parse_init_strategy(s));
    require(inits.size() == a.experts, "--init lists " + std::to_string(inits.size()) +
                                           " strategies for " + std::to_string(a.experts) +
                                           " experts");
  }

  const DatasetBundle data = load_bundle(a.data);
  ModelConfig mc;
  mc.in_dim = data.meta.feature_dim;
  mc.num_classes = data.meta.num_classes;
  for (InitStrategy s : inits) mc.experts.push_back({a.order, a.hidden, s, a.alpha});
  mc.gate.mode = mode;
  mc.gate.k = k;
  mc.gate.hidden = a.gate_hidden;
  mc.gate.epsilon = a.epsilon;
  mc.dropout = a.dropout;
  mc.seed = a.seed;

  TrainConfig tc;
  tc.max_epochs = a.epochs;
  tc.patience = a.patience;
  tc.lr_network = a.lr;
  tc.lr_filter = a.lr_filter;
  tc.wd_network = a.wd;
  tc.wd_filter = a.wd_filter;
  tc.loss = {a.gamma, a.beta};
  tc.seed = a.seed;

  json cfg = {{"data", a.data},
              {"experts", a.experts},
              {"order", a.order},
              {"init", json::array()},
              {"alpha", a.alpha},
              {"gamma", a.gamma},
              {"beta", a.beta},
              {"mode", a.mode},
              {"k", k},
              {"seed", a.seed},
              {"repeats", a.repeats},
              {"out", a.out},
              {"epochs", a.epochs},
              {"patience", a.patience},
              {"lr", a.lr},
              {"lr_filter", a.lr_filter},
              {"wd", a.wd},
              {"wd_filter", a.wd_filter},
              {"dropout", a.dropout},
              {"hidden", a.hidden},
              {"gate_hidden", a.gate_hidden},
              {"epsilon", a.epsilon},
              {"history", a.history},
              {"split", data.split ? "splits.json" : "random 60/20/20"}};
  for (InitStrategy s : inits) cfg["init"].push_back(std::string(to_string(s)));
  print_config(out, "train", cfg);
  mc.validate();
  tc.validate();

  std::vector<std::string> warnings;
  const Split split = data.split ? *data.split : make_split(data.labels, {}, a.seed, &warnings);
  for (const auto& w : warnings) out << "warning: " << w << '\n';

  const ModelInputs inputs(data.graph, data.features);
  std::unique_ptr<NodeMoe> best;
  TrainConfig best_tc;
  TrainResult best_result;
  double best_val = -1.0;
  double test_sum = 0.0;
  for (std::size_t r = 0; r < a.repeats; ++r) {
    ModelConfig rmc = mc;
    TrainConfig rtc = tc;
    rmc.seed = rtc.seed = a.seed + r;
    auto model = std::make_unique<NodeMoe>(rmc);
    TrainResult res = train(*model, inputs, data.labels, split, rtc);
    const double test = evaluate(*model, inputs, data.labels, split.test).accuracy;
    test_sum += test;
    out << "repeat " << r << ": seed " << rmc.seed << ", best epoch " << res.best_epoch
        << ", val_acc " << format_double(res.best_val_acc) << ", test_acc " << format_double(test)
        << '\n';
    if (res.best_val_acc > best_val) {
      best_val = res.best_val_acc;
      best = std::move(model);
      best_tc = rtc;
      best_result = std::move(res);
    }
  }
  out << "mean test_acc " << format_double(test_sum / static_cast<double>(a.repeats)) << '\n';
  save_checkpoint(a.out, *best, best_tc, split);
  if (!a.history.empty()) {
    auto h = open_output(a.history);
    write_history_csv(h, best_result.history);
  }
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string data;
  std::string ckpt;
  std::string split = "test";
  std::string out;
};

int run_evaluate(const EvaluateArgs& a, std::ostream& out) {
  print_config(out, "evaluate",
               {{"data", a.data}, {"ckpt", a.ckpt}, {"split", a.split}, {"out", a.out}});
  const DatasetBundle data = load_bundle(a.data);
  Checkpoint ck = load_checkpoint(a.ckpt);
  const auto& idx = ck.split.part(a.split);
  ck.split.validate(data.meta.num_nodes);
  const ModelInputs inputs(data.graph, data.features);
  const auto pred = argmax_rows(ck.model->predict(inputs));
  const EvalResult r = evaluate_predictions(pred, data.labels, idx);
  out << a.split << "_acc " << format_double(r.accuracy) << " (" << idx.size() << " nodes)\n";
  if (!a.out.empty()) {
    auto f = open_output(a.out);
    f << "node,label,predicted,correct\n";
    for (std::size_t t = 0; t < idx.size(); ++t) {
      f << idx[t] << ',' << data.labels.labels[idx[t]] << ',' << pred[idx[t]] << ','
        << (r.correct[t] ? 1 : 0) << '\n';
    }
  }
  return kExitOk;
}

// ----------------------------------------------------------------- analyze

struct AnalyzeArgs {
  std::string data;
  std::string ckpt;
  std::string baseline;
  std::string report;
  std::string out;
  std::string svg;
  std::string split = "test";
  std::size_t bins = 50;
  std::size_t buckets = 5;
  std::size_t top = 10;
  std::uint64_t seed = 0;
  std::optional<std::size_t> high_pass;
};

void maybe_svg(const std::string& path, const LinePlot& plot) {
  if (path.empty()) return;
  auto f = open_output(path);
  write_svg(f, plot);
}

int run_analyze(const AnalyzeArgs& a, std::ostream& out) {
  json cfg = {{"data", a.data},   {"ckpt", a.ckpt},       {"baseline", a.baseline},
              {"report", a.report}, {"out", a.out},       {"svg", a.svg},
              {"split", a.split}, {"bins", a.bins},       {"buckets", a.buckets},
              {"top", a.top},     {"seed", a.seed},
              {"high_pass_expert", a.high_pass ? json(*a.high_pass) : json("auto")}};
  print_config(out, "analyze", cfg);
  const DatasetBundle data = load_bundle(a.data);
  auto csv = open_output(a.out);

  auto need_ckpt = [&] {
    if (a.ckpt.empty()) throw ValidationError("--report " + a.report + " requires --ckpt");
    return load_checkpoint(a.ckpt);
  };

  if (a.report == "homophily") {
    const DensityTable t = homophily_density(data.graph, data.labels, a.bins);
    write_density_csv(csv, t);
    out << "mean node homophily "
        << format_double(graph_homophily(node_homophily(data.graph, data.labels)))
        << ", density mode " << format_double(t.mode()) << ", bandwidth "
        << format_double(t.bandwidth) << ", isolated " << t.isolated << '\n';
    maybe_svg(a.svg, {"Node homophily density", "homophily", "density", t.centers,
                      {{"density", t.density}}});
  } else if (a.report == "communities") {
    const auto rows = community_homophily(data.graph, data.labels, a.seed, a.top);
    write_communities_csv(csv, rows);
    out << rows.size() << " communities reported\n";
  } else if (a.report == "gates") {
    Checkpoint ck = need_ckpt();
    const ModelInputs inputs(data.graph, data.features);
    const Matrix gate = ck.model->gate_weights(inputs);
    const auto filters = ck.model->filters();
    const std::size_t hp = a.high_pass ? *a.high_pass : pick_high_pass(filters);
    const auto t = gate_weight_by_homophily(gate, node_homophily(data.graph, data.labels), hp,
                                            a.buckets);
    write_gate_buckets_csv(csv, t);
    out << "high-pass expert " << t.high_pass_expert << ", spearman " << format_double(t.spearman)
        << ", isolated " << t.isolated;
    if (!t.empty_buckets.empty()) {
      out << ", empty buckets:";
      for (std::size_t b : t.empty_buckets) out << ' ' << b;
    }
    out << '\n';
    LinePlot plot{"Gate weight by homophily", "homophily bucket", "mean gate weight", {}, {}};
    for (const auto& b : t.buckets) plot.x.push_back(0.5 * (b.lo + b.hi));
    for (std::size_t o = 0; o < gate.cols(); ++o) {
      PlotSeries s{"expert " + std::to_string(o), {}};
      for (const auto& b : t.buckets) s.y.push_back(b.mean_weight[o]);
      plot.series.push_back(std::move(s));
    }
    maybe_svg(a.svg, plot);
  } else if (a.report == "filters") {
    Checkpoint ck = need_ckpt();
    const auto filters = ck.model->filters();
    const Matrix r = filter_responses(filters, SmoothingGrid::uniform());
    write_filters_csv(csv, r);
    LinePlot plot{"Learned filters", "lambda", "response", {}, {}};
    for (std::size_t i = 0; i < r.rows(); ++i) plot.x.push_back(r(i, 0));
    for (std::size_t o = 0; o < filters.size(); ++o) {
      PlotSeries s{"expert " + std::to_string(o), {}};
      for (std::size_t i = 0; i < r.rows(); ++i) s.y.push_back(r(i, o + 1));
      plot.series.push_back(std::move(s));
    }
    maybe_svg(a.svg, plot);
  } else if (a.report == "accuracy-buckets") {
    Checkpoint ck = need_ckpt();
    if (a.baseline.empty()) throw ValidationError("--report accuracy-buckets requires --baseline");
    Checkpoint base = load_checkpoint(a.baseline);
    const auto& idx = ck.split.part(a.split);
    require(base.split.part(a.split) == idx, "--ckpt and --baseline were trained on different splits");
    const ModelInputs inputs(data.graph, data.features);
    const auto ra = evaluate(*ck.model, inputs, data.labels, idx);
    const auto rb = evaluate(*base.model, inputs, data.labels, idx);
    const auto rows = accuracy_by_homophily(ra.correct, rb.correct,
                                            node_homophily(data.graph, data.labels), idx, a.buckets);
    write_accuracy_buckets_csv(csv, rows);
    out << "overall acc_a " << format_double(ra.accuracy) << ", acc_b " << format_double(rb.accuracy)
        << '\n';
  } else {
    throw ValidationError("unknown report '" + a.report + "'");
  }
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

// -------------------------------------------------------- validate-theorem

struct TheoremArgs {
  std::string preset;
  std::string params;
  std::size_t seeds = 10;
  std::uint64_t seed = 0;
  double radius = 1.0;
  std::string out;
};

// "key=value,..." over n, d, p0, q0, p1, q1, P, dist; unset keys keep the
// regime-1 values.
std::pair<CsbmParams, double> parse_params(const std::string& spec) {
  CsbmParams p = regime1_params(0);
  double dist = 1.0;
  std::map<std::string, double*> reals = {{"p0", &p.p0}, {"q0", &p.q0}, {"p1", &p.p1},
                                          {"q1", &p.q1}, {"P", &p.homophilic_prob},
                                          {"dist", &dist}};
  for (const auto& item : split_list(spec)) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ValidationError("--params entry '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string val = item.substr(eq + 1);
    try {
      std::size_t used = 0;
      if (key == "n" || key == "d") {
        const unsigned long v = std::stoul(val, &used);
        (key == "n" ? p.n : p.d) = v;
      } else if (auto it = reals.find(key); it != reals.end()) {
        *it->second = std::stod(val, &used);
      } else {
        throw ValidationError("--params: unknown key '" + key +
                              "' (expected n, d, p0, q0, p1, q1, P, dist)");
      }
      if (used != val.size()) throw std::invalid_argument(val);
    } catch (const ValidationError&) {
      throw;
    } catch (const std::exception&) {
      throw ValidationError("--params: value '" + val + "' for '" + key + "' is not a number");
    }
  }
  std::tie(p.mu, p.nu) = default_means(p.d, dist);
  return {p, dist};
}

int run_theorem(const TheoremArgs& a, std::ostream& out) {
  CsbmParams p;
  double dist = 1.0;
  if (!a.params.empty()) {
    std::tie(p, dist) = parse_params(a.params);
  } else {
    if (!a.preset.empty() && a.preset != "regime1") {
      throw ValidationError("unknown preset '" + a.preset + "' (expected regime1)");
    }
    p = regime1_params(a.seed);
  }
  json cfg = params_json(p, dist);
  cfg.erase("seed");
  cfg["preset"] = a.params.empty() ? "regime1" : "";
  cfg["seeds"] = a.seeds;
  cfg["first_seed"] = a.seed;
  cfg["radius"] = a.radius;
  cfg["out"] = a.out;
  print_config(out, "validate-theorem", cfg);
  p.validate();
  require(a.seeds >= 1, "--seeds must be >= 1");
  require(a.radius >= 0.0, "--radius must be >= 0");

  for (const auto& w : regime_warnings(p)) out << "warning: " << w << '\n';
  const auto rows = run_theorem_validation(p, a.radius, a.seed, a.seeds);
  for (const auto& r : rows) {
    out << "seed " << r.seed << ": part1 h0_acc " << format_double(r.h0_acc) << ", h1_acc "
        << format_double(r.h1_acc) << ", h1_bce " << format_double(r.h1_bce) << " (bound "
        << format_double(r.bound) << "), all_acc " << format_double(r.part1_all_acc)
        << "; part2 acc " << format_double(r.part2_acc);
    for (const auto& f : r.flags) out << " [" << f << ']';
    out << '\n';
  }
  auto csv = open_output(a.out);
  write_theorem_csv(csv, rows);
  out << "wrote " << a.out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------- export-filters

int run_export_filters(const std::string& ckpt, const std::string& path, const std::string& svg,
                       std::ostream& out) {
  print_config(out, "export-filters", {{"ckpt", ckpt}, {"out", path}, {"svg", svg}});
  const Checkpoint ck = load_checkpoint(ckpt);
  const auto filters = ck.model->filters();
  const Matrix r = filter_responses(filters, SmoothingGrid::uniform());
  auto csv = open_output(path);
  write_filters_csv(csv, r);
  LinePlot plot{"Learned filters", "lambda", "response", {}, {}};
  for (std::size_t i = 0; i < r.rows(); ++i) plot.x.push_back(r(i, 0));
  for (std::size_t o = 0; o < filters.size(); ++o) {
    PlotSeries s{"expert " + std::to_string(o), {}};
    for (std::size_t i = 0; i < r.rows(); ++i) s.y.push_back(r(i, o + 1));
    plot.series.push_back(std::move(s));
  }
  maybe_svg(svg, plot);
  out << "wrote " << path << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Node-wise spectral filtering with a mixture of experts", "nodemoe"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample a mixed-pattern CSBM dataset");
  g->add_option("--n", gen.n, "Node count")->capture_default_str();
  g->add_option("--d", gen.d, "Feature dimension")->capture_default_str();
  g->add_option("--p0", gen.p0, "Same-class edge probability, homophilic pattern")->capture_default_str();
  g->add_option("--q0", gen.q0, "Cross-class edge probability, homophilic pattern")->capture_default_str();
  g->add_option("--p1", gen.p1, "Same-class edge probability, heterophilic pattern")->capture_default_str();
  g->add_option("--q1", gen.q1, "Cross-class edge probability, heterophilic pattern")->capture_default_str();
  g->add_option("--P", gen.P, "Probability that a node is homophilic")->capture_default_str();
  g->add_option("--mu-nu-dist", gen.dist, "||mu - nu||")->capture_default_str();
  g->add_option("--seed", gen.seed)->capture_default_str();
  g->add_option("--name", gen.name)->capture_default_str();
  g->add_option("--out", gen.out, "Output dataset directory")->required();

  TrainArgs tr;
  std::size_t k_value = 0;
  auto* t = app.add_subcommand("train", "Train a Node-MoE model");
  t->add_option("--data", tr.data, "Dataset directory")->required();
  t->add_option("--experts", tr.experts)->capture_default_str();
  t->add_option("--order", tr.order, "Chebyshev order K")->capture_default_str();
  t->add_option("--init", tr.init, "Comma-separated decreasing|increasing|uniform per expert");
  t->add_option("--alpha", tr.alpha, "Init power base")->capture_default_str();
  t->add_option("--gamma", tr.gamma, "Filter smoothing weight")->capture_default_str();
  t->add_option("--beta", tr.beta, "Load-balancing weight")->capture_default_str();
  t->add_option("--mode", tr.mode, "soft or topk")->capture_default_str();
  auto* k_opt = t->add_option("--k", k_value, "Experts kept per node in topk mode");
  t->add_option("--seed", tr.seed)->capture_default_str();
  t->add_option("--repeats", tr.repeats, "Runs with seeds seed..seed+repeats-1")->capture_default_str();
  t->add_option("--out", tr.out, "Checkpoint path")->required();
  t->add_option("--epochs", tr.epochs)->capture_default_str();
  t->add_option("--patience", tr.patience)->capture_default_str();
  t->add_option("--lr", tr.lr, "Network learning rate")->capture_default_str();
  t->add_option("--lr-filter", tr.lr_filter)->capture_default_str();
  t->add_option("--wd", tr.wd, "Network weight decay")->capture_default_str();
  t->add_option("--wd-filter", tr.wd_filter)->capture_default_str();
  t->add_option("--dropout", tr.dropout)->capture_default_str();
  t->add_option("--hidden", tr.hidden, "Expert MLP width")->capture_default_str();
  t->add_option("--gate-hidden", tr.gate_hidden)->capture_default_str();
  t->add_option("--epsilon", tr.epsilon, "GIN self weight")->capture_default_str();
  t->add_option("--history", tr.history, "Training history CSV");

  EvaluateArgs ev;
  auto* e = app.add_subcommand("evaluate", "Accuracy of a checkpoint on a split part");
  e->add_option("--data", ev.data)->required();
  e->add_option("--ckpt", ev.ckpt)->required();
  e->add_option("--split", ev.split, "train, val or test")->capture_default_str();
  e->add_option("--out", ev.out, "Per-node predictions CSV");

  AnalyzeArgs an;
  std::size_t hp_value = 0;
  auto* a = app.add_subcommand("analyze", "Homophily, community, gate and filter reports");
  a->add_option("--data", an.data)->required();
  a->add_option("--ckpt", an.ckpt);
  a->add_option("--baseline", an.baseline, "Second checkpoint for accuracy-buckets");
  a->add_option("--report", an.report)
      ->required()
      ->check(CLI::IsMember({"homophily", "communities", "gates", "filters", "accuracy-buckets"}));
  a->add_option("--out", an.out)->required();
  a->add_option("--svg", an.svg, "Also write an SVG plot");
  a->add_option("--split", an.split)->capture_default_str();
  a->add_option("--bins", an.bins)->capture_default_str();
  a->add_option("--buckets", an.buckets)->capture_default_str();
  a->add_option("--top", an.top)->capture_default_str();
  a->add_option("--seed", an.seed)->capture_default_str();
  auto* hp_opt = a->add_option("--high-pass-expert", hp_value);

  TheoremArgs th;
  auto* v = app.add_subcommand("validate-theorem", "Check the separability claims on CSBM samples");
  auto* preset = v->add_option("--preset", th.preset, "regime1");
  auto* params = v->add_option("--params", th.params, "key=value,... over n,d,p0,q0,p1,q1,P,dist");
  preset->excludes(params);
  v->add_option("--seeds", th.seeds)->capture_default_str();
  v->add_option("--seed", th.seed, "First seed")->capture_default_str();
  v->add_option("--radius", th.radius, "Norm bound R")->capture_default_str();
  v->add_option("--out", th.out)->required();

  std::string ef_ckpt, ef_out, ef_svg;
  auto* x = app.add_subcommand("export-filters", "Frequency responses of a checkpoint's experts");
  x->add_option("--ckpt", ef_ckpt)->required();
  x->add_option("--out", ef_out)->required();
  x->add_option("--svg", ef_svg);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  }

  try {
    if (g->parsed()) return run_generate(gen, out);
    if (t->parsed()) {
      if (k_opt->count() > 0) tr.k = k_value;
      return run_train(tr, out);
    }
    if (e->parsed()) return run_evaluate(ev, out);
    if (a->parsed()) {
      if (hp_opt->count() > 0) an.high_pass = hp_value;
      return run_analyze(an, out);
    }
    if (v->parsed()) return run_theorem(th, out);
    if (x->parsed()) return run_export_filters(ef_ckpt, ef_out, ef_svg, out);
  } catch (const ValidationError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const RuntimeFailure& ex) {
    err << "runtime failure: " << ex.what() << '\n';
    return kExitRuntime;
  } catch (const std::exception& ex) {
    err << "runtime failure: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace nodemoe
