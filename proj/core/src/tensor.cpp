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

#include "citetrend/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "citetrend/error.hpp"

namespace citetrend {

Tensor::Tensor(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw Error(ErrorKind::kShapeMismatch, "buffer of " + std::to_string(data_.size()) +
                                               " for shape " + std::to_string(rows) + "x" +
                                               std::to_string(cols));
  }
}

double Tensor::item() const {
  if (data_.size() != 1) throw Error(ErrorKind::kShapeMismatch, "item() on non-scalar");
  return data_[0];
}

void Tensor::fill(double v) {
  for (double& x : data_) x = v;
}

Tensor Tensor::transposed() const {
  Tensor t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r) {
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

void SparseMatrix::push_row(std::span<const std::pair<std::size_t, double>> entries) {
  for (const auto& [col, value] : entries) {
    if (col >= cols) throw Error(ErrorKind::kShapeMismatch, "sparse column out of range");
    col_index.push_back(col);
    values.push_back(value);
  }
  row_ptr.push_back(values.size());
  ++rows;
}

Tensor SparseMatrix::to_dense() const {
  Tensor d(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) d(r, col_index[p]) = values[p];
  }
  return d;
}

SparseMatrix SparseMatrix::select_rows(std::span<const std::size_t> picked) const {
  SparseMatrix out(picked.size(), cols);
  std::vector<std::pair<std::size_t, double>> buf;
  for (std::size_t r : picked) {
    if (r >= rows) throw Error(ErrorKind::kShapeMismatch, "sparse row out of range");
    buf.clear();
    for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) buf.emplace_back(col_index[p], values[p]);
    out.push_row(buf);
  }
  return out;
}

double SparseMatrix::row_norm(std::size_t r) const {
  double s = 0.0;
  for (std::size_t p = row_ptr[r]; p < row_ptr[r + 1]; ++p) s += values[p] * values[p];
  return std::sqrt(s);
}

namespace {

// out[0:n] += a * b[0:n]; a plain loop the compiler vectorizes without
// reassociating any sum.
inline void axpy(double a, const double* __restrict b, double* __restrict out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] += a * b[j];
}

using v4d = double __attribute__((vector_size(32)));

inline v4d load4(const double* p) {
  v4d v;
  __builtin_memcpy(&v, p, sizeof v);
  return v;
}

inline void store4(double* p, v4d v) { __builtin_memcpy(p, &v, sizeof v); }

// C[0:m, 0:n] (+)= A[0:m, 0:k] B[0:k, 0:n], all row-major with leading
// dimensions. Every element starts from 0 (or its old value) and adds
// a[i][p] * b[p][j] for p = 0, 1, ..., k-1 in that order, whatever the
// blocking, so row i of C depends on row i of A alone and results are
// bitwise reproducible.
void gemm_kernel(const double* a, std::size_t lda, const double* b, std::size_t ldb, double* c,
                 std::size_t ldc, std::size_t m, std::size_t n, std::size_t k, bool accumulate) {
  constexpr std::size_t kRows = 4;
  constexpr std::size_t kCols = 8;
  std::size_t j = 0;
  for (; j + kCols <= n; j += kCols) {
    std::size_t i = 0;
    for (; i + kRows <= m; i += kRows) {
      v4d acc[kRows][2];
      for (std::size_t r = 0; r < kRows; ++r) {
        if (accumulate) {
          acc[r][0] = load4(c + (i + r) * ldc + j);
          acc[r][1] = load4(c + (i + r) * ldc + j + 4);
        } else {
          acc[r][0] = v4d{0, 0, 0, 0};
          acc[r][1] = v4d{0, 0, 0, 0};
        }
      }
      const double* a0 = a + i * lda;
      for (std::size_t p = 0; p < k; ++p) {
        const v4d b0 = load4(b + p * ldb + j);
        const v4d b1 = load4(b + p * ldb + j + 4);
        for (std::size_t r = 0; r < kRows; ++r) {
          const double s = a0[r * lda + p];
          acc[r][0] += s * b0;
          acc[r][1] += s * b1;
        }
      }
      for (std::size_t r = 0; r < kRows; ++r) {
        store4(c + (i + r) * ldc + j, acc[r][0]);
        store4(c + (i + r) * ldc + j + 4, acc[r][1]);
      }
    }
    for (; i < m; ++i) {
      v4d acc0 = accumulate ? load4(c + i * ldc + j) : v4d{0, 0, 0, 0};
      v4d acc1 = accumulate ? load4(c + i * ldc + j + 4) : v4d{0, 0, 0, 0};
      for (std::size_t p = 0; p < k; ++p) {
        const double s = a[i * lda + p];
        acc0 += s * load4(b + p * ldb + j);
        acc1 += s * load4(b + p * ldb + j + 4);
      }
      store4(c + i * ldc + j, acc0);
      store4(c + i * ldc + j + 4, acc1);
    }
  }
  for (; j + 4 <= n; j += 4) {
    for (std::size_t i = 0; i < m; ++i) {
      v4d acc = accumulate ? load4(c + i * ldc + j) : v4d{0, 0, 0, 0};
      for (std::size_t p = 0; p < k; ++p) acc += a[i * lda + p] * load4(b + p * ldb + j);
      store4(c + i * ldc + j, acc);
    }
  }
  for (; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      double acc = accumulate ? c[i * ldc + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) acc += a[i * lda + p] * b[p * ldb + j];
      c[i * ldc + j] = acc;
    }
  }
}

}  // namespace

void gemm(const Tensor& a, const Tensor& b, Tensor& c) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "matmul " + std::to_string(a.rows()) + "x" +
                                               std::to_string(a.cols()) + " by " +
                                               std::to_string(b.rows()) + "x" +
                                               std::to_string(b.cols()));
  }
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  if (c.rows() != m || c.cols() != n) c = Tensor(m, n);
  gemm_kernel(a.data().data(), k, b.data().data(), n, c.data().data(), n, m, n, k, false);
}

void gemm_at_b_accumulate(const Tensor& a, const Tensor& b, Tensor& c) {
  if (a.rows() != b.rows() || c.rows() != a.cols() || c.cols() != b.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "gemm_at_b shapes");
  }
  const Tensor at = a.transposed();
  gemm_kernel(at.data().data(), at.cols(), b.data().data(), b.cols(), c.data().data(), c.cols(), c.rows(),
              c.cols(), a.rows(), true);
}

void spmm(const SparseMatrix& s, const Tensor& b, Tensor& c) {
  if (s.cols != b.rows()) throw Error(ErrorKind::kShapeMismatch, "spmm inner dimension");
  const std::size_t n = b.cols();
  if (c.rows() != s.rows || c.cols() != n) c = Tensor(s.rows, n);
  c.fill(0.0);
  const double* bp = b.data().data();
  for (std::size_t r = 0; r < s.rows; ++r) {
    double* cr = c.data().data() + r * n;
    for (std::size_t p = s.row_ptr[r]; p < s.row_ptr[r + 1]; ++p) {
      axpy(s.values[p], bp + s.col_index[p] * n, cr, n);
    }
  }
}

}  // namespace citetrend
