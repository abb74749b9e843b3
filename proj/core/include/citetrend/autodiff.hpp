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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "citetrend/tensor.hpp"

namespace citetrend::ad {

/// A trainable tensor and its accumulated gradient.
struct Parameter {
  std::string name;
  Tensor value;
  Tensor grad;

  Parameter() = default;
  Parameter(std::string n, Tensor v) : name(std::move(n)), value(std::move(v)), grad(value.rows(), value.cols()) {}

  void zero_grad() { grad = Tensor(value.rows(), value.cols()); }
};

class Tape;

/// Handle to a value recorded on a Tape.
struct Var {
  Tape* tape = nullptr;
  std::size_t index = 0;

  const Tensor& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
};

/// Reverse-mode tape. Records are appended in evaluation order, so the
/// record list is already a topological order; backward() walks it once in
/// reverse.
class Tape {
 public:
  using BackwardFn = std::function<void(Tape&, const Tensor& out_grad)>;

  /// With `record_gradients == false` no backward rules are kept and
  /// parameters enter as constants (evaluation mode).
  explicit Tape(bool record_gradients = true) : record_(record_gradients) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const noexcept { return record_; }

  Var constant(Tensor value);
  Var parameter(Parameter& p);

  /// Appends a result. `fn` is only stored if some input requires grad.
  Var push(Tensor value, std::span<const Var> inputs, BackwardFn fn);
  Var push(Tensor value, std::initializer_list<Var> inputs, BackwardFn fn) {
    return push(std::move(value), std::span<const Var>(inputs.begin(), inputs.size()), std::move(fn));
  }

  const Tensor& value(Var v) const { return records_.at(v.index).value; }
  bool requires_grad(Var v) const { return records_.at(v.index).requires_grad; }
  /// Gradient buffer of a record, allocated (zeroed) on first use.
  Tensor& grad_buffer(std::size_t index);
  /// Gradient of a record after backward(); empty tensor if none flowed.
  const Tensor& grad(Var v) const { return records_.at(v.index).grad; }

  /// Seeds d(loss)/d(loss) = 1 and propagates to every parameter leaf,
  /// adding into Parameter::grad. Fan-out contributions sum.
  void backward(Var loss);

  std::size_t size() const noexcept { return records_.size(); }

 private:
  struct Record {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    BackwardFn backward;
    Parameter* parameter = nullptr;
  };
  bool record_;
  std::vector<Record> records_;
};

enum class Reduce { kSum, kMean, kMax };

/// Boolean mask for dense masked softmax; 1 keeps a position.
struct Mask {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::uint8_t> keep;

  bool operator()(std::size_t r, std::size_t c) const { return keep[r * cols + c] != 0; }
};

Var matmul(Var a, Var b);
/// Constant sparse matrix times a tape value. `s` must outlive the tape.
Var spmm(const SparseMatrix& s, Var b);
Var add(Var a, Var b);
/// Adds a 1 x n row to every row of `a`.
Var add_row(Var a, Var row);
/// Concatenates along columns; all inputs share the row count.
Var concat(std::span<const Var> parts);
Var leaky_relu(Var a, double slope);
/// Inverted dropout: kept entries are scaled by 1 / (1 - rate). Identity when
/// `training` is false or rate is 0.
Var dropout(Var a, double rate, std::mt19937_64& rng, bool training);
Var sigmoid(Var a);
/// Softmax across each row over positions kept by `mask`; masked positions
/// are exactly 0. Throws EmptySoftmaxRow when a row keeps nothing.
Var masked_softmax(Var a, const Mask& mask);
/// Sparse form of masked_softmax: a is E x 1 and entry e belongs to row
/// `segments[e]`; normalizes within each segment.
Var segment_softmax(Var a, std::span<const std::size_t> segments, std::size_t num_segments);
Var gather_rows(Var a, std::span<const std::size_t> indices);
/// Row-major reinterpretation with the same element count.
Var reshape(Var a, std::size_t rows, std::size_t cols);
Var transpose(Var a);
/// Edge e gets s(dst[e], 0) + s(src[e], 1) for an n x 2 score table s.
Var edge_scores(Var s, std::span<const std::size_t> dst, std::span<const std::size_t> src);
/// Reduces row e of `a` into output row `indices[e]`. Empty output rows are 0.
/// Max routes the gradient to the first maximal entry.
Var scatter_reduce(Var a, std::span<const std::size_t> indices, std::size_t num_segments, Reduce mode);
/// Multiplies row r of `a` by the scalar w(r, 0).
Var scale_rows(Var a, Var w);
Var sum(Var a);
Var mean(Var a);
/// Mean positive-weighted binary cross entropy on logits (n x 1).
Var bce_with_logits(Var logits, std::span<const double> labels, double pos_weight);

}  // namespace citetrend::ad
