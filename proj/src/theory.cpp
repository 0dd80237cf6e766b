// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "nodemoe/common.hpp"
#include "nodemoe/format.hpp"
#include "nodemoe/graph.hpp"
#include "nodemoe/simd/kernels.hpp"

namespace nodemoe {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  std::iota(r.begin(), r.end(), std::size_t{0});
  return r;
}

double score(const LogisticFit& fit, const Matrix& x, std::size_t i) {
  return simd::active().dot(fit.w.data(), x.row(i).data(), x.cols()) + fit.b;
}

double l2(std::span<const double> v) {
  return std::sqrt(simd::active().dot(v.data(), v.data(), v.size()));
}

std::vector<std::size_t> rows_with(const CsbmSample& s, Pattern p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < s.pattern.size(); ++i) {
    if (s.pattern[i] == p) out.push_back(i);
  }
  return out;
}

}  // namespace

LogisticFit fit_bounded_logistic(const Matrix& x, std::span<const int> y, double radius,
                                 std::span<const std::size_t> rows, const LogisticOptions& opt) {
  require(radius >= 0.0 && std::isfinite(radius), "radius must be finite and >= 0");
  require(y.size() == x.rows(), "label count != feature rows");
  std::vector<std::size_t> owned;
  if (rows.empty()) {
    owned = all_rows(x.rows());
    rows = owned;
  }
  require(!rows.empty(), "logistic fit needs at least one row");
  for (std::size_t i : rows) {
    require(i < x.rows(), "fit row out of range");
    require(y[i] == 0 || y[i] == 1, "logistic fit needs binary labels, got " + std::to_string(y[i]));
  }

  const auto& k = simd::active();
  const std::size_t d = x.cols();
  const double inv = 1.0 / static_cast<double>(rows.size());
  LogisticFit fit;
  fit.w.assign(d, 0.0);
  std::vector<double> gw(d);
  for (std::size_t step = 0; step < opt.steps; ++step) {
    std::fill(gw.begin(), gw.end(), 0.0);
    double gb = 0.0;
    for (std::size_t i : rows) {
      const double r = sigmoid(score(fit, x, i)) - static_cast<double>(y[i]);
      k.axpy(r * inv, x.row(i).data(), gw.data(), d);
      gb += r * inv;
    }
    k.axpy(-opt.rate, gw.data(), fit.w.data(), d);
    fit.b -= opt.rate * gb;
    const double norm = l2(fit.w);
    if (norm > radius) {
      if (radius == 0.0) {
        std::fill(fit.w.begin(), fit.w.end(), 0.0);
      } else {
        k.scale(radius / norm, fit.w.data(), d);
      }
    }
  }
  return fit;
}

double logistic_bce(const LogisticFit& fit, const Matrix& x, std::span<const int> y,
                    std::span<const std::size_t> rows) {
  if (rows.empty()) return kNaN;
  double sum = 0.0;
  for (std::size_t i : rows) {
    const double sign = y[i] == 1 ? 1.0 : -1.0;
    sum += softplus(-sign * score(fit, x, i));
  }
  return sum / static_cast<double>(rows.size());
}

double logistic_accuracy(const LogisticFit& fit, const Matrix& x, std::span<const int> y,
                         std::span<const std::size_t> rows) {
  if (rows.empty()) return kNaN;
  std::size_t hits = 0;
  for (std::size_t i : rows) hits += ((score(fit, x, i) > 0.0 ? 1 : 0) == y[i]) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(rows.size());
}

double separability_bound(const CsbmParams& params, double radius) {
  std::vector<double> diff(params.mu.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = params.mu[j] - params.nu[j];
  return radius * (params.q1 - params.p1) / (2.0 * (params.q1 + params.p1)) * l2(diff);
}

std::vector<std::string> regime_warnings(const CsbmParams& params) {
  std::vector<std::string> out;
  const double n = static_cast<double>(params.n);
  const double logn = std::log(n);
  if ((params.p0 + params.q0) * n < logn * logn) {
    out.push_back("edge density below log^2(n)/n; filtered features may not concentrate");
  }
  std::vector<double> diff(params.mu.size());
  for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = params.mu[j] - params.nu[j];
  const double dist = l2(diff);
  const double noise = 1.0 / std::sqrt((params.p0 + params.q0) * n);
  if (dist <= noise) {
    out.push_back("||mu - nu|| = " + format_double(dist) +
                  " is not above the filtered noise scale " + format_double(noise));
  }
  return out;
}

Matrix filtered_features(const CsbmSample& sample, bool node_wise) {
  NormalizedOperator op(sample.graph, OperatorKind::row_adj);
  Matrix f = op.apply(sample.features);
  if (node_wise) {
    for (std::size_t i = 0; i < f.rows(); ++i) {
      if (sample.pattern[i] == Pattern::heterophilic) simd::active().scale(-1.0, f.row(i).data(), f.cols());
    }
  }
  return f;
}

SeparabilityReport validate_part1(const CsbmSample& sample, const CsbmParams& params,
                                  double radius) {
  const auto h0 = rows_with(sample, Pattern::homophilic);
  const auto h1 = rows_with(sample, Pattern::heterophilic);
  require(!h0.empty(), "part 1 needs homophilic nodes to fit on; H0 is empty");
  SeparabilityReport r;
  r.params = params;
  r.radius = radius;
  r.flags = regime_warnings(params);
  r.h0_count = h0.size();
  r.h1_count = h1.size();
  if (h1.empty()) r.flags.push_back("H1 empty");
  const Matrix f = filtered_features(sample, false);
  const auto& y = sample.labels.labels;
  r.fit = fit_bounded_logistic(f, y, radius, h0);
  r.h0_acc = logistic_accuracy(r.fit, f, y, h0);
  r.h1_acc = logistic_accuracy(r.fit, f, y, h1);
  r.h1_bce = logistic_bce(r.fit, f, y, h1);
  r.all_acc = logistic_accuracy(r.fit, f, y, all_rows(f.rows()));
  r.bound = separability_bound(params, radius);
  return r;
}

SeparabilityReport validate_part2(const CsbmSample& sample, const CsbmParams& params,
                                  double radius) {
  SeparabilityReport r;
  r.params = params;
  r.radius = radius;
  r.flags = regime_warnings(params);
  const auto h0 = rows_with(sample, Pattern::homophilic);
  const auto h1 = rows_with(sample, Pattern::heterophilic);
  r.h0_count = h0.size();
  r.h1_count = h1.size();
  if (h0.empty()) r.flags.push_back("H0 empty");
  if (h1.empty()) r.flags.push_back("H1 empty");
  const Matrix f = filtered_features(sample, true);
  const auto& y = sample.labels.labels;
  const auto all = all_rows(f.rows());
  r.fit = fit_bounded_logistic(f, y, radius, all);
  r.h0_acc = logistic_accuracy(r.fit, f, y, h0);
  r.h1_acc = logistic_accuracy(r.fit, f, y, h1);
  r.h1_bce = logistic_bce(r.fit, f, y, h1);
  r.all_acc = logistic_accuracy(r.fit, f, y, all);
  r.bound = separability_bound(params, radius);
  return r;
}

std::vector<MeanCheck> filtered_mean_check(const CsbmSample& sample, const CsbmParams& params,
                                           bool node_wise) {
  const Matrix f = filtered_features(sample, node_wise);
  const std::size_t d = f.cols();
  std::vector<MeanCheck> out;
  for (int cls = 0; cls < 2; ++cls) {
    for (Pattern p : {Pattern::homophilic, Pattern::heterophilic}) {
      std::vector<double> mean(d, 0.0);
      std::size_t count = 0;
      for (std::size_t i = 0; i < f.rows(); ++i) {
        if (sample.labels.labels[i] != cls || sample.pattern[i] != p) continue;
        simd::active().axpy(1.0, f.row(i).data(), mean.data(), d);
        ++count;
      }
      if (count == 0) continue;
      auto expected = expected_filtered_mean(params, cls, p);
      const double sign = node_wise && p == Pattern::heterophilic ? -1.0 : 1.0;
      MeanCheck c;
      c.cls = cls;
      c.pattern = p;
      c.count = count;
      for (std::size_t j = 0; j < d; ++j) {
        const double dev = std::abs(mean[j] / static_cast<double>(count) - sign * expected[j]);
        c.max_abs_dev = std::max(c.max_abs_dev, dev);
      }
      c.tolerance = 5.0 / std::sqrt(static_cast<double>(count * d));
      c.pass = c.max_abs_dev <= c.tolerance;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<TheoremRow> run_theorem_validation(const CsbmParams& params, double radius,
                                               std::uint64_t first_seed, std::size_t seeds) {
  params.validate();
  std::vector<TheoremRow> rows;
  for (std::size_t s = 0; s < seeds; ++s) {
    CsbmParams p = params;
    p.seed = first_seed + s;
    const CsbmSample sample = generate(p);
    TheoremRow row;
    row.seed = p.seed;
    if (std::none_of(sample.pattern.begin(), sample.pattern.end(),
                     [](Pattern q) { return q == Pattern::homophilic; })) {
      row.h0_acc = row.h1_acc = row.h1_bce = row.part1_all_acc = kNaN;
      row.flags.push_back("H0 empty");
    } else {
      const auto r1 = validate_part1(sample, p, radius);
      row.h0_acc = r1.h0_acc;
      row.h1_acc = r1.h1_acc;
      row.h1_bce = r1.h1_bce;
      row.part1_all_acc = r1.all_acc;
      row.flags = r1.flags;
    }
    const auto r2 = validate_part2(sample, p, radius);
    row.part2_acc = r2.all_acc;
    row.bound = r2.bound;
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_theorem_csv(std::ostream& out, std::span<const TheoremRow> rows) {
  out << "seed,h0_acc,h1_acc,h1_bce,bound,part2_acc\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << format_double(r.h0_acc) << ',' << format_double(r.h1_acc) << ','
        << format_double(r.h1_bce) << ',' << format_double(r.bound) << ','
        << format_double(r.part2_acc) << '\n';
  }
}

}  // namespace nodemoe
