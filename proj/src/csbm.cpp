// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/csbm.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "nodemoe/common.hpp"

namespace nodemoe {
namespace {

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }

}  // namespace

void CsbmParams::validate() const {
  require(n >= 2, "csbm: n must be at least 2");
  require(d >= 1, "csbm: d must be at least 1");
  require(mu.size() == d && nu.size() == d, "csbm: mu and nu must have length d");
  require(norm2(mu) <= 1.0 + 1e-12 && norm2(nu) <= 1.0 + 1e-12,
          "csbm: class means must have norm <= 1");
  require(in_unit(p0) && in_unit(q0) && in_unit(p1) && in_unit(q1),
          "csbm: edge probabilities must lie in [0, 1]");
  require(in_unit(homophilic_prob), "csbm: P must lie in [0, 1]");
  require(p0 > q0, "csbm: homophilic pattern needs p0 > q0");
  require(p1 < q1, "csbm: heterophilic pattern needs p1 < q1");
  require(std::abs((p0 + q0) - (p1 + q1)) <= 1e-12, "csbm: p0 + q0 must equal p1 + q1");
}

std::pair<std::vector<double>, std::vector<double>> default_means(std::size_t d, double distance) {
  require(d >= 1, "default_means: d must be positive");
  require(distance >= 0.0 && distance <= 2.0, "default_means: distance must lie in [0, 2]");
  const double s = 0.5 * distance / std::sqrt(static_cast<double>(d));
  return {std::vector<double>(d, s), std::vector<double>(d, -s)};
}

CsbmParams regime1_params(std::uint64_t seed) {
  CsbmParams p;
  p.n = 2000;
  p.d = 100;
  std::tie(p.mu, p.nu) = default_means(p.d, 1.0);
  p.p0 = 0.05;
  p.q0 = 0.01;
  p.p1 = 0.01;
  p.q1 = 0.05;
  p.homophilic_prob = 0.5;
  p.seed = seed;
  return p;
}

double canonical_feature(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return std::strtod(buf, nullptr);
}

CsbmSample generate(const CsbmParams& params) {
  params.validate();
  const std::size_t n = params.n;
  const std::size_t d = params.d;
  std::mt19937_64 rng(params.seed);
  std::bernoulli_distribution fair(0.5);
  std::bernoulli_distribution homophilic(params.homophilic_prob);
  std::normal_distribution<double> noise(0.0, 1.0 / std::sqrt(static_cast<double>(d)));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  CsbmSample s;
  s.labels.num_classes = 2;
  s.labels.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) s.labels.labels[i] = fair(rng) ? 1 : 0;
  s.pattern.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.pattern[i] = homophilic(rng) ? Pattern::homophilic : Pattern::heterophilic;
  }

  s.features = Matrix(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& mean = s.labels.labels[i] == 0 ? params.mu : params.nu;
    auto row = s.features.row(i);
    for (std::size_t j = 0; j < d; ++j) row[j] = canonical_feature(mean[j] + noise(rng));
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    const bool hom = s.pattern[i] == Pattern::homophilic;
    const double p = hom ? params.p0 : params.p1;
    const double q = hom ? params.q0 : params.q1;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double prob = s.labels.labels[i] == s.labels.labels[j] ? p : q;
      if (unit(rng) < prob) edges.emplace_back(i, j);
    }
  }
  s.graph = Graph::build(edges, n);
  return s;
}

std::vector<double> expected_filtered_mean(const CsbmParams& params, int cls, Pattern pattern) {
  params.validate();
  require(cls == 0 || cls == 1, "expected_filtered_mean: class must be 0 or 1");
  const bool hom = pattern == Pattern::homophilic;
  const double p = hom ? params.p0 : params.p1;
  const double q = hom ? params.q0 : params.q1;
  const double w_mu = (cls == 0 ? p : q) / (p + q);
  const double w_nu = (cls == 0 ? q : p) / (p + q);
  std::vector<double> m(params.d);
  for (std::size_t j = 0; j < params.d; ++j) m[j] = w_mu * params.mu[j] + w_nu * params.nu[j];
  return m;
}

}  // namespace nodemoe
