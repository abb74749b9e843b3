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

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace citetrend {

/// Dense row-major matrix of doubles. Vectors are 1 x n or n x 1, scalars 1 x 1.
class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Tensor(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Tensor scalar(double v) { return Tensor(1, 1, v); }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::array<std::size_t, 2> shape() const noexcept { return {rows_, cols_}; }
  bool same_shape(const Tensor& o) const noexcept { return rows_ == o.rows_ && cols_ == o.cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double item() const;

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& values() const noexcept { return data_; }

  void fill(double v);
  Tensor transposed() const;

  bool operator==(const Tensor&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Compressed sparse row matrix; used for the constant tf-idf and
/// affiliation feature blocks. Column indices are ascending within a row.
struct SparseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::size_t> col_index;
  std::vector<double> values;

  SparseMatrix() = default;
  SparseMatrix(std::size_t r, std::size_t c) : rows(0), cols(c) { row_ptr.reserve(r + 1); }

  std::size_t nnz() const noexcept { return values.size(); }
  /// Appends a row; `entries` must be sorted by column.
  void push_row(std::span<const std::pair<std::size_t, double>> entries);
  Tensor to_dense() const;
  SparseMatrix select_rows(std::span<const std::size_t> rows) const;
  double row_norm(std::size_t r) const;

  bool operator==(const SparseMatrix&) const = default;
};

/// C = A * B with a fixed per-element accumulation order, so each output row
/// depends only on the matching row of A (bitwise, regardless of how many
/// rows A has).
void gemm(const Tensor& a, const Tensor& b, Tensor& c);
/// C += A^T * B
void gemm_at_b_accumulate(const Tensor& a, const Tensor& b, Tensor& c);
/// C = S * B for sparse S.
void spmm(const SparseMatrix& s, const Tensor& b, Tensor& c);

}  // namespace citetrend
