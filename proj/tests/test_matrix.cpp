// Copyright (C) 2026 The nodemoe Authors
// SPDX-License-Identifier: Apache-2.0

#include <random>

#include "doctest.h"
#include "nodemoe/common.hpp"
#include "nodemoe/matrix.hpp"
#include "test_util.hpp"

using namespace nodemoe;

TEST_SUITE("matrix") {

TEST_CASE("from_rows lays rows out contiguously") {
  const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m(1, 0) == 4);
  CHECK(m.row(1)[2] == 6);
  CHECK_THROWS_AS(Matrix::from_rows({{1, 2}, {3}}), ValidationError);
}

TEST_CASE("products agree with a naive triple loop") {
  std::mt19937_64 rng(1);
  const Matrix a = testing::random_matrix(7, 5, rng);
  const Matrix b = testing::random_matrix(5, 9, rng);
  const Matrix c = testing::random_matrix(7, 9, rng);
  CHECK(max_abs_diff(matmul(a, b), testing::naive_matmul(a, b)) <= 1e-14);
  CHECK(max_abs_diff(matmul_tn(a, c), testing::naive_matmul(transpose(a), c)) <= 1e-14);
  CHECK(max_abs_diff(matmul_nt(c, b), testing::naive_matmul(c, transpose(b))) <= 1e-14);
  Matrix acc = c;
  matmul_accumulate(a, b, acc);
  Matrix expect = testing::naive_matmul(a, b);
  for (std::size_t i = 0; i < expect.size(); ++i) expect.data()[i] += c.data()[i];
  CHECK(max_abs_diff(acc, expect) <= 1e-14);
  CHECK_THROWS_AS(matmul(a, a), ValidationError);
}

TEST_CASE("concat_columns stacks blocks side by side") {
  const Matrix a = Matrix::from_rows({{1}, {2}});
  const Matrix b = Matrix::from_rows({{3, 4}, {5, 6}});
  const Matrix blocks[] = {a, b};
  CHECK(concat_columns(blocks) == Matrix::from_rows({{1, 3, 4}, {2, 5, 6}}));
  const Matrix bad[] = {a, Matrix(3, 1)};
  CHECK_THROWS_AS(concat_columns(bad), ValidationError);
}

TEST_CASE("norms") {
  const Matrix m = Matrix::from_rows({{3, -4}});
  CHECK(frobenius_norm(m) == doctest::Approx(5.0));
  CHECK(max_abs(m) == 4.0);
  CHECK(max_abs_diff(m, Matrix::from_rows({{3, -3}})) == 1.0);
}

}  // TEST_SUITE
