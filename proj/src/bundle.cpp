// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/bundle.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "json.hpp"
#include "nodemoe/common.hpp"

namespace nodemoe {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string where(const fs::path& file, std::size_t line) {
  return file.filename().string() + ":" + std::to_string(line);
}

std::ifstream open_in(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ValidationError("missing or unreadable file " + file.string());
  return in;
}

std::ofstream open_out(const fs::path& file) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + file.string());
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  return s;
}

template <typename T>
T parse_number(std::string_view field, const fs::path& file, std::size_t line) {
  field = trim(field);
  T value{};
  const auto res = std::from_chars(field.data(), field.data() + field.size(), value);
  if (res.ec != std::errc() || res.ptr != field.data() + field.size() || field.empty()) {
    throw ValidationError(where(file, line) + ": '" + std::string(field) + "' is not a valid " +
                          (std::is_floating_point_v<T> ? "number" : "non-negative integer"));
  }
  return value;
}

std::vector<std::string_view> split_fields(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> read_lines(const fs::path& file) {
  auto in = open_in(file);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  // A final newline does not start another record.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  return lines;
}

json read_json(const fs::path& file) {
  auto in = open_in(file);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(file.filename().string() + ": malformed JSON: " + e.what());
  }
}

template <typename T>
T json_field(const json& j, const char* key, const fs::path& file) {
  if (!j.is_object() || !j.contains(key)) {
    throw ValidationError(file.filename().string() + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ValidationError(file.filename().string() + ": field '" + key + "': " + e.what());
  }
}

std::string format_feature(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

void DatasetBundle::validate() const {
  require(meta.num_nodes > 0, "dataset has no nodes");
  require(graph.num_nodes() == meta.num_nodes, "graph node count != meta num_nodes");
  require(features.rows() == meta.num_nodes && features.cols() == meta.feature_dim,
          "features shape != meta (num_nodes x feature_dim)");
  require(labels.size() == meta.num_nodes, "label count != meta num_nodes");
  require(labels.num_classes == static_cast<int>(meta.num_classes),
          "label class count != meta num_classes");
  labels.validate();
  if (split) split->validate(meta.num_nodes);
  if (pattern) require(pattern->size() == meta.num_nodes, "pattern count != meta num_nodes");
}

DatasetBundle bundle_from_sample(const CsbmSample& sample, std::string name) {
  DatasetBundle b;
  b.meta.name = std::move(name);
  b.meta.num_nodes = sample.graph.num_nodes();
  b.meta.feature_dim = sample.features.cols();
  b.meta.num_classes = static_cast<std::size_t>(sample.labels.num_classes);
  b.graph = sample.graph;
  b.features = sample.features;
  b.labels = sample.labels;
  b.pattern = sample.pattern;
  return b;
}

CsbmSample sample_from_bundle(const DatasetBundle& bundle) {
  require(bundle.pattern.has_value(), "dataset has no pattern.csv; not a generated CSBM sample");
  return {bundle.graph, bundle.features, bundle.labels, *bundle.pattern};
}

void save_bundle(const DatasetBundle& bundle, const fs::path& dir) {
  bundle.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ValidationError("cannot create directory " + dir.string() + ": " + ec.message());

  {
    json meta = {{"name", bundle.meta.name},
                 {"num_nodes", bundle.meta.num_nodes},
                 {"feature_dim", bundle.meta.feature_dim},
                 {"num_classes", bundle.meta.num_classes}};
    open_out(dir / "meta.json") << meta.dump(2) << '\n';
  }
  {
    auto out = open_out(dir / "edges.tsv");
    for (const auto& [u, v] : bundle.graph.edge_list()) out << u << '\t' << v << '\n';
  }
  {
    auto out = open_out(dir / "features.csv");
    std::string line;
    for (std::size_t i = 0; i < bundle.features.rows(); ++i) {
      line.clear();
      for (std::size_t j = 0; j < bundle.features.cols(); ++j) {
        if (j > 0) line += ',';
        line += format_feature(bundle.features(i, j));
      }
      out << line << '\n';
    }
  }
  {
    auto out = open_out(dir / "labels.csv");
    for (int y : bundle.labels.labels) out << y << '\n';
  }
  if (bundle.split) {
    json s = {{"train", bundle.split->train}, {"val", bundle.split->val}, {"test", bundle.split->test}};
    open_out(dir / "splits.json") << s.dump() << '\n';
  }
  if (bundle.pattern) {
    auto out = open_out(dir / "pattern.csv");
    for (Pattern p : *bundle.pattern) out << static_cast<int>(p) << '\n';
  }
}

DatasetBundle load_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("dataset directory " + dir.string() + " not found");
  DatasetBundle b;

  const fs::path meta_file = dir / "meta.json";
  const json meta = read_json(meta_file);
  b.meta.name = meta.contains("name") ? json_field<std::string>(meta, "name", meta_file) : "";
  b.meta.num_nodes = json_field<std::size_t>(meta, "num_nodes", meta_file);
  b.meta.feature_dim = json_field<std::size_t>(meta, "feature_dim", meta_file);
  b.meta.num_classes = json_field<std::size_t>(meta, "num_classes", meta_file);
  require(b.meta.num_nodes > 0, "meta.json: num_nodes must be positive");
  require(b.meta.num_classes >= 2, "meta.json: num_classes must be >= 2");
  const std::size_t n = b.meta.num_nodes;
  const std::size_t d = b.meta.feature_dim;

  const fs::path edge_file = dir / "edges.tsv";
  std::vector<Edge> edges;
  {
    const auto lines = read_lines(edge_file);
    for (std::size_t ln = 0; ln < lines.size(); ++ln) {
      const std::string_view line = trim(lines[ln]);
      if (line.empty()) continue;
      const auto f = split_fields(line, '\t');
      if (f.size() != 2) {
        throw ValidationError(where(edge_file, ln + 1) + ": expected 'src<TAB>dst', got " +
                              std::to_string(f.size()) + " fields");
      }
      const auto u = parse_number<std::size_t>(f[0], edge_file, ln + 1);
      const auto v = parse_number<std::size_t>(f[1], edge_file, ln + 1);
      if (u >= n || v >= n) {
        throw ValidationError(where(edge_file, ln + 1) + ": endpoint " +
                              std::to_string(std::max(u, v)) + " >= num_nodes " +
                              std::to_string(n));
      }
      edges.emplace_back(u, v);
    }
  }
  b.graph = Graph::build(edges, n, &b.edge_stats);

  const fs::path feat_file = dir / "features.csv";
  {
    const auto lines = read_lines(feat_file);
    if (lines.size() != n) {
      throw ValidationError("features.csv: " + std::to_string(lines.size()) + " rows, expected " +
                            std::to_string(n));
    }
    b.features = Matrix(n, d);
    for (std::size_t i = 0; i < n; ++i) {
      const auto f = split_fields(trim(lines[i]), ',');
      if (f.size() != d) {
        throw ValidationError(where(feat_file, i + 1) + ": " + std::to_string(f.size()) +
                              " values, expected " + std::to_string(d));
      }
      for (std::size_t j = 0; j < d; ++j) b.features(i, j) = parse_number<double>(f[j], feat_file, i + 1);
    }
  }

  const fs::path label_file = dir / "labels.csv";
  {
    const auto lines = read_lines(label_file);
    if (lines.size() != n) {
      throw ValidationError("labels.csv: " + std::to_string(lines.size()) + " rows, expected " +
                            std::to_string(n));
    }
    b.labels.num_classes = static_cast<int>(b.meta.num_classes);
    for (std::size_t i = 0; i < n; ++i) {
      const auto y = parse_number<long>(lines[i], label_file, i + 1);
      if (y < 0 || y >= static_cast<long>(b.meta.num_classes)) {
        throw ValidationError(where(label_file, i + 1) + ": label " + std::to_string(y) +
                              " outside [0, " + std::to_string(b.meta.num_classes) + ")");
      }
      b.labels.labels.push_back(static_cast<int>(y));
    }
  }

  const fs::path split_file = dir / "splits.json";
  if (fs::exists(split_file)) {
    const json s = read_json(split_file);
    Split split;
    split.train = json_field<std::vector<std::size_t>>(s, "train", split_file);
    split.val = json_field<std::vector<std::size_t>>(s, "val", split_file);
    split.test = json_field<std::vector<std::size_t>>(s, "test", split_file);
    b.split = std::move(split);
  }

  const fs::path pattern_file = dir / "pattern.csv";
  if (fs::exists(pattern_file)) {
    const auto lines = read_lines(pattern_file);
    if (lines.size() != n) {
      throw ValidationError("pattern.csv: " + std::to_string(lines.size()) + " rows, expected " +
                            std::to_string(n));
    }
    std::vector<Pattern> pattern;
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = parse_number<int>(lines[i], pattern_file, i + 1);
      if (p != 0 && p != 1) {
        throw ValidationError(where(pattern_file, i + 1) + ": pattern must be 0 or 1");
      }
      pattern.push_back(static_cast<Pattern>(p));
    }
    b.pattern = std::move(pattern);
  }

  b.validate();
  return b;
}

}  // namespace nodemoe
