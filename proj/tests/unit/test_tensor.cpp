// Copyright 2026 The citetrend Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "citetrend/error.hpp"
#include "citetrend/tensor.hpp"

namespace citetrend {
namespace {

Tensor random_tensor(std::mt19937_64& rng, std::size_t r, std::size_t c) {
  std::normal_distribution<double> n(0.0, 1.0);
  Tensor t(r, c);
  for (double& v : t.data()) v = n(rng);
  return t;
}

// Textbook triple loop with the same k order.
Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  Tensor c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      c(i, j) = s;
    }
  }
  return c;
}

TEST(Tensor, ShapeAndAccess) {
  Tensor t(2, 3, 1.5);
  EXPECT_EQ(t.size(), 6u);
  t(1, 2) = 4.0;
  EXPECT_EQ(t.row(1)[2], 4.0);
  EXPECT_EQ(t.transposed()(2, 1), 4.0);
  EXPECT_THROW(Tensor(2, 2, std::vector<double>(3)), Error);
  EXPECT_THROW(t.item(), Error);
  EXPECT_EQ(Tensor::scalar(2.5).item(), 2.5);
}

TEST(Gemm, MatchesNaiveLoopBitwiseForOddShapes) {
  std::mt19937_64 rng(1);
  for (auto [m, k, n] : {std::tuple{1, 1, 1}, {3, 5, 7}, {9, 4, 13}, {17, 33, 8}, {4, 8, 12}, {6, 2, 31}}) {
    const Tensor a = random_tensor(rng, m, k), b = random_tensor(rng, k, n);
    Tensor c;
    gemm(a, b, c);
    EXPECT_EQ(c, naive_matmul(a, b)) << m << "x" << k << "x" << n;
  }
}

TEST(Gemm, EachRowDependsOnlyOnItsOwnInputRow) {
  std::mt19937_64 rng(2);
  const Tensor a = random_tensor(rng, 23, 19), b = random_tensor(rng, 19, 21);
  Tensor full;
  gemm(a, b, full);
  for (std::size_t r = 0; r < a.rows(); ++r) {
    Tensor single(1, a.cols(), std::vector<double>(a.row(r).begin(), a.row(r).end()));
    Tensor out;
    gemm(single, b, out);
    for (std::size_t c = 0; c < b.cols(); ++c) ASSERT_EQ(out(0, c), full(r, c));
  }
}

TEST(Gemm, AtBAccumulates) {
  std::mt19937_64 rng(3);
  const Tensor a = random_tensor(rng, 11, 6), b = random_tensor(rng, 11, 9);
  Tensor c(6, 9, 1.0);
  gemm_at_b_accumulate(a, b, c);
  const Tensor expect = naive_matmul(a.transposed(), b);
  for (std::size_t i = 0; i < 6; ++i) {
    for (std::size_t j = 0; j < 9; ++j) EXPECT_NEAR(c(i, j), 1.0 + expect(i, j), 1e-12);
  }
  Tensor wrong(5, 9);
  EXPECT_THROW(gemm_at_b_accumulate(a, b, wrong), Error);
}

TEST(Gemm, ShapeMismatchThrows) {
  Tensor c;
  try {
    gemm(Tensor(2, 3), Tensor(4, 2), c);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShapeMismatch);
  }
}

TEST(SparseMatrix, PushRowDenseAndSelect) {
  SparseMatrix s(3, 4);
  const std::pair<std::size_t, double> r0[] = {{0, 1.0}, {3, 2.0}};
  const std::pair<std::size_t, double> r2[] = {{1, -1.0}};
  s.push_row(r0);
  s.push_row({});
  s.push_row(r2);
  EXPECT_EQ(s.rows, 3u);
  EXPECT_EQ(s.nnz(), 3u);
  const Tensor d = s.to_dense();
  EXPECT_EQ(d(0, 3), 2.0);
  EXPECT_EQ(d(2, 1), -1.0);
  EXPECT_DOUBLE_EQ(s.row_norm(0), std::sqrt(5.0));
  const std::size_t pick[] = {2, 0};
  const SparseMatrix sel = s.select_rows(pick);
  EXPECT_EQ(sel.to_dense()(0, 1), -1.0);
  EXPECT_EQ(sel.to_dense()(1, 0), 1.0);
  const std::pair<std::size_t, double> bad[] = {{4, 1.0}};
  EXPECT_THROW(s.push_row(bad), Error);
}

TEST(Spmm, MatchesDenseProduct) {
  std::mt19937_64 rng(4);
  SparseMatrix s(5, 6);
  for (std::size_t r = 0; r < 5; ++r) {
    std::vector<std::pair<std::size_t, double>> row;
    for (std::size_t c = 0; c < 6; ++c) {
      if (rng() % 3 == 0) row.emplace_back(c, std::normal_distribution<double>()(rng));
    }
    s.push_row(row);
  }
  const Tensor b = random_tensor(rng, 6, 7);
  Tensor out;
  spmm(s, b, out);
  const Tensor expect = naive_matmul(s.to_dense(), b);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out.data()[i], expect.data()[i], 1e-12);
}

}  // namespace
}  // namespace citetrend
