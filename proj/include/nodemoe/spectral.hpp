// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "nodemoe/graph.hpp"
#include "nodemoe/matrix.hpp"

namespace nodemoe {

// Chebyshev polynomial of the first kind, T_k(x).
double chebyshev_t(std::size_t k, double x);

// Polynomial filter f(lambda) = sum_k theta_k T_k(lambda - 1) on the
// normalized Laplacian spectrum [0, 2].
struct FilterCoeffs {
  std::vector<double> theta;

  std::size_t order() const { return theta.empty() ? 0 : theta.size() - 1; }
  void validate() const;
};

enum class InitStrategy { decreasing, increasing, uniform };

InitStrategy parse_init_strategy(std::string_view name);
std::string_view to_string(InitStrategy strategy);

// Power sequences: decreasing [a^0 .. a^K], increasing [a^K .. a^0],
// uniform [1 .. 1]. Returned verbatim as coefficients.
FilterCoeffs init_coeffs(InitStrategy strategy, double alpha, std::size_t order);

// Chebyshev nodes x_j = cos((K - j + 1/2) pi / (K + 1)), ascending in j, on
// the rescaled axis x = lambda - 1.
std::vector<double> chebyshev_nodes(std::size_t order);

// Coefficients of the degree-K polynomial taking `values[j]` at node j.
FilterCoeffs interpolate_node_values(std::span<const double> values);

// The power sequence of init_coeffs read as filter values at the Chebyshev
// nodes (low to high frequency) and converted to coefficients. Decreasing is
// a low-pass start, increasing a high-pass start and uniform the identity.
FilterCoeffs init_filter(InitStrategy strategy, double alpha, std::size_t order);

// Throws ValidationError when lambda is outside [0, 2].
double frequency_response(const FilterCoeffs& f, double lambda);

// Ascending eigenvalue samples spanning [0, 2], both endpoints included.
struct SmoothingGrid {
  std::vector<double> points;

  static SmoothingGrid uniform(std::size_t count = 51);
  void validate() const;
};

// sum_i |f(x_i) - f(x_{i-1})|^2
double smoothing_loss(const FilterCoeffs& f, const SmoothingGrid& grid);
std::vector<double> smoothing_loss_gradient(const FilterCoeffs& f, const SmoothingGrid& grid);

// Row i: T_k(x_{i+1} - 1) - T_k(x_i - 1) for k = 0..K, so that the response
// differences are this matrix times theta.
Matrix smoothing_difference_matrix(const SmoothingGrid& grid, std::size_t order);

// blocks[k] = T_k(L) h for the shifted Laplacian L.
struct SpectralBasis {
  std::vector<Matrix> blocks;

  std::size_t order() const { return blocks.empty() ? 0 : blocks.size() - 1; }
};

SpectralBasis precompute_basis(const NormalizedOperator& op, const Matrix& h, std::size_t order);

// sum_k theta_k blocks[k]
Matrix assemble_filter(const SpectralBasis& basis, const FilterCoeffs& f);

}  // namespace nodemoe
