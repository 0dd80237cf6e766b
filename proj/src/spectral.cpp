// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include "nodemoe/spectral.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "nodemoe/common.hpp"
#include "nodemoe/simd/kernels.hpp"

namespace nodemoe {

double chebyshev_t(std::size_t k, double x) {
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (std::size_t i = 1; i < k; ++i) {
    const double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void FilterCoeffs::validate() const {
  require(theta.size() >= 2, "filter order K must be at least 1");
}

InitStrategy parse_init_strategy(std::string_view name) {
  if (name == "decreasing") return InitStrategy::decreasing;
  if (name == "increasing") return InitStrategy::increasing;
  if (name == "uniform") return InitStrategy::uniform;
  throw ValidationError("unknown init strategy '" + std::string(name) +
                        "' (expected decreasing, increasing or uniform)");
}

std::string_view to_string(InitStrategy strategy) {
  switch (strategy) {
    case InitStrategy::decreasing: return "decreasing";
    case InitStrategy::increasing: return "increasing";
    case InitStrategy::uniform: return "uniform";
  }
  return "uniform";
}

FilterCoeffs init_coeffs(InitStrategy strategy, double alpha, std::size_t order) {
  require(order >= 1, "filter order K must be at least 1");
  require(alpha > 0.0 && alpha <= 1.0, "init alpha must lie in (0, 1]");
  FilterCoeffs f;
  f.theta.resize(order + 1);
  for (std::size_t k = 0; k <= order; ++k) {
    switch (strategy) {
      case InitStrategy::decreasing:
        f.theta[k] = std::pow(alpha, static_cast<double>(k));
        break;
      case InitStrategy::increasing:
        f.theta[k] = std::pow(alpha, static_cast<double>(order - k));
        break;
      case InitStrategy::uniform:
        f.theta[k] = 1.0;
        break;
    }
  }
  return f;
}

std::vector<double> chebyshev_nodes(std::size_t order) {
  std::vector<double> x(order + 1);
  const double denom = static_cast<double>(order + 1);
  for (std::size_t j = 0; j <= order; ++j) {
    x[j] = std::cos((static_cast<double>(order - j) + 0.5) * std::numbers::pi / denom);
  }
  return x;
}

FilterCoeffs interpolate_node_values(std::span<const double> values) {
  require(values.size() >= 2, "need at least 2 node values");
  const std::size_t order = values.size() - 1;
  const auto nodes = chebyshev_nodes(order);
  FilterCoeffs f;
  f.theta.assign(order + 1, 0.0);
  const double scale = 2.0 / static_cast<double>(order + 1);
  for (std::size_t k = 0; k <= order; ++k) {
    double s = 0.0;
    for (std::size_t j = 0; j <= order; ++j) s += values[j] * chebyshev_t(k, nodes[j]);
    f.theta[k] = scale * s;
  }
  f.theta[0] *= 0.5;
  return f;
}

FilterCoeffs init_filter(InitStrategy strategy, double alpha, std::size_t order) {
  return interpolate_node_values(init_coeffs(strategy, alpha, order).theta);
}

double frequency_response(const FilterCoeffs& f, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 2.0)) {
    throw ValidationError("frequency_response: lambda " + std::to_string(lambda) +
                          " outside [0, 2]");
  }
  // Clenshaw recurrence.
  const double x = lambda - 1.0;
  double b1 = 0.0;
  double b2 = 0.0;
  for (std::size_t k = f.theta.size(); k-- > 1;) {
    const double b0 = f.theta[k] + 2.0 * x * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  const double t0 = f.theta.empty() ? 0.0 : f.theta[0];
  return t0 + x * b1 - b2;
}

SmoothingGrid SmoothingGrid::uniform(std::size_t count) {
  require(count >= 2, "smoothing grid needs at least 2 points");
  SmoothingGrid g;
  g.points.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    g.points[i] = 2.0 * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  g.points.back() = 2.0;
  return g;
}

void SmoothingGrid::validate() const {
  require(points.size() >= 2, "smoothing grid needs at least 2 points");
  require(points.front() == 0.0 && points.back() == 2.0, "smoothing grid must span [0, 2]");
  for (std::size_t i = 1; i < points.size(); ++i) {
    require(points[i] >= points[i - 1], "smoothing grid must be ascending");
  }
}

Matrix smoothing_difference_matrix(const SmoothingGrid& grid, std::size_t order) {
  grid.validate();
  const std::size_t s = grid.points.size() - 1;
  Matrix m(s, order + 1);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t k = 0; k <= order; ++k) {
      m(i, k) = chebyshev_t(k, grid.points[i + 1] - 1.0) - chebyshev_t(k, grid.points[i] - 1.0);
    }
  }
  return m;
}

double smoothing_loss(const FilterCoeffs& f, const SmoothingGrid& grid) {
  grid.validate();
  double loss = 0.0;
  double prev = frequency_response(f, grid.points[0]);
  for (std::size_t i = 1; i < grid.points.size(); ++i) {
    const double cur = frequency_response(f, grid.points[i]);
    loss += (cur - prev) * (cur - prev);
    prev = cur;
  }
  return loss;
}

std::vector<double> smoothing_loss_gradient(const FilterCoeffs& f, const SmoothingGrid& grid) {
  const Matrix diff = smoothing_difference_matrix(grid, f.order());
  std::vector<double> grad(f.theta.size(), 0.0);
  for (std::size_t i = 0; i < diff.rows(); ++i) {
    const double r = simd::active().dot(diff.row(i).data(), f.theta.data(), f.theta.size());
    simd::active().axpy(2.0 * r, diff.row(i).data(), grad.data(), grad.size());
  }
  return grad;
}

SpectralBasis precompute_basis(const NormalizedOperator& op, const Matrix& h, std::size_t order) {
  require(order >= 1, "filter order K must be at least 1");
  require(h.rows() == op.graph().num_nodes(), "basis input rows do not match the graph");
  SpectralBasis basis;
  basis.blocks.reserve(order + 1);
  basis.blocks.push_back(h);
  basis.blocks.push_back(op.apply(h));
  const auto& k = simd::active();
  for (std::size_t i = 2; i <= order; ++i) {
    Matrix next = op.apply(basis.blocks[i - 1]);
    k.scale(2.0, next.data(), next.size());
    k.axpy(-1.0, basis.blocks[i - 2].data(), next.data(), next.size());
    basis.blocks.push_back(std::move(next));
  }
  return basis;
}

Matrix assemble_filter(const SpectralBasis& basis, const FilterCoeffs& f) {
  require(!basis.blocks.empty(), "empty spectral basis");
  require(f.theta.size() == basis.blocks.size(),
          "filter order " + std::to_string(f.order()) + " does not match basis order " +
              std::to_string(basis.order()));
  Matrix out(basis.blocks[0].rows(), basis.blocks[0].cols());
  for (std::size_t k = 0; k < basis.blocks.size(); ++k) {
    simd::active().axpy(f.theta[k], basis.blocks[k].data(), out.data(), out.size());
  }
  return out;
}

}  // namespace nodemoe
