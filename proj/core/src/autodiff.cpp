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

#include "citetrend/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <string>

#include "citetrend/error.hpp"
#include "citetrend/random.hpp"

namespace citetrend::ad {

namespace {

std::string shape_str(const Tensor& t) {
  return std::to_string(t.rows()) + "x" + std::to_string(t.cols());
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (!a.same_shape(b)) {
    throw Error(ErrorKind::kShapeMismatch,
                std::string(op) + ": " + shape_str(a) + " vs " + shape_str(b));
  }
}

void add_into(Tensor& dst, const Tensor& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

inline double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

Tape& tape_of(Var v) {
  if (v.tape == nullptr) throw Error(ErrorKind::kInvalidArgument, "Var without tape");
  return *v.tape;
}

}  // namespace

const Tensor& Var::value() const { return tape->value(*this); }

Var Tape::constant(Tensor value) {
  records_.push_back(Record{std::move(value), {}, false, {}, nullptr});
  return Var{this, records_.size() - 1};
}

Var Tape::parameter(Parameter& p) {
  records_.push_back(Record{p.value, {}, record_, {}, record_ ? &p : nullptr});
  return Var{this, records_.size() - 1};
}

Var Tape::push(Tensor value, std::span<const Var> inputs, BackwardFn fn) {
  bool needs = false;
  for (Var v : inputs) {
    if (v.tape != this) throw Error(ErrorKind::kInvalidArgument, "Var from another tape");
    needs = needs || records_.at(v.index).requires_grad;
  }
  Record rec{std::move(value), {}, needs && record_, {}, nullptr};
  if (rec.requires_grad) rec.backward = std::move(fn);
  records_.push_back(std::move(rec));
  return Var{this, records_.size() - 1};
}

Tensor& Tape::grad_buffer(std::size_t index) {
  Record& r = records_.at(index);
  if (r.grad.size() != r.value.size() || r.grad.rows() != r.value.rows()) {
    r.grad = Tensor(r.value.rows(), r.value.cols());
  }
  return r.grad;
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw Error(ErrorKind::kInvalidArgument, "loss from another tape");
  if (value(loss).size() != 1) {
    throw Error(ErrorKind::kNotScalarLoss, "loss has shape " + shape_str(value(loss)));
  }
  if (!records_.at(loss.index).requires_grad) return;
  grad_buffer(loss.index).fill(1.0);
  for (std::size_t i = loss.index + 1; i-- > 0;) {
    Record& r = records_[i];
    if (!r.requires_grad || r.grad.size() == 0) continue;
    if (r.backward) r.backward(*this, r.grad);
    if (r.parameter != nullptr) {
      if (!r.parameter->grad.same_shape(r.parameter->value)) r.parameter->zero_grad();
      add_into(r.parameter->grad, r.grad);
    }
  }
}

// ---- forward ops ---------------------------------------------------------

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a);
  Tensor out;
  gemm(a.value(), b.value(), out);
  const std::size_t ia = a.index, ib = b.index;
  return t.push(std::move(out), {a, b}, [ia, ib](Tape& tp, const Tensor& g) {
    const Tensor& av = tp.value(Var{&tp, ia});
    const Tensor& bv = tp.value(Var{&tp, ib});
    if (tp.requires_grad(Var{&tp, ia})) {
      Tensor da;
      gemm(g, bv.transposed(), da);
      add_into(tp.grad_buffer(ia), da);
    }
    if (tp.requires_grad(Var{&tp, ib})) gemm_at_b_accumulate(av, g, tp.grad_buffer(ib));
  });
}

Var spmm(const SparseMatrix& s, Var b) {
  Tape& t = tape_of(b);
  Tensor out;
  spmm(s, b.value(), out);
  const std::size_t ib = b.index;
  const SparseMatrix* sp = &s;
  return t.push(std::move(out), {b}, [sp, ib](Tape& tp, const Tensor& g) {
    Tensor& db = tp.grad_buffer(ib);
    const std::size_t n = g.cols();
    for (std::size_t r = 0; r < sp->rows; ++r) {
      auto gr = g.row(r);
      for (std::size_t p = sp->row_ptr[r]; p < sp->row_ptr[r + 1]; ++p) {
        auto dr = db.row(sp->col_index[p]);
        const double v = sp->values[p];
        for (std::size_t j = 0; j < n; ++j) dr[j] += v * gr[j];
      }
    }
  });
}

Var add(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor out = a.value();
  add_into(out, b.value());
  const std::size_t ia = a.index, ib = b.index;
  return tape_of(a).push(std::move(out), {a, b}, [ia, ib](Tape& tp, const Tensor& g) {
    if (tp.requires_grad(Var{&tp, ia})) add_into(tp.grad_buffer(ia), g);
    if (tp.requires_grad(Var{&tp, ib})) add_into(tp.grad_buffer(ib), g);
  });
}

Var add_row(Var a, Var row) {
  const Tensor& av = a.value();
  const Tensor& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw Error(ErrorKind::kShapeMismatch, "add_row: " + shape_str(av) + " + " + shape_str(rv));
  }
  Tensor out = av;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto o = out.row(r);
    for (std::size_t c = 0; c < o.size(); ++c) o[c] += rv(0, c);
  }
  const std::size_t ia = a.index, ir = row.index;
  return tape_of(a).push(std::move(out), {a, row}, [ia, ir](Tape& tp, const Tensor& g) {
    if (tp.requires_grad(Var{&tp, ia})) add_into(tp.grad_buffer(ia), g);
    if (tp.requires_grad(Var{&tp, ir})) {
      Tensor& dr = tp.grad_buffer(ir);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        auto gr = g.row(r);
        for (std::size_t c = 0; c < gr.size(); ++c) dr(0, c) += gr[c];
      }
    }
  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw Error(ErrorKind::kInvalidArgument, "concat of nothing");
  Tape& t = tape_of(parts[0]);
  const std::size_t rows = parts[0].rows();
  std::vector<std::size_t> idx, offsets;
  std::size_t total = 0;
  for (Var p : parts) {
    if (p.rows() != rows) throw Error(ErrorKind::kShapeMismatch, "concat row counts differ");
    idx.push_back(p.index);
    offsets.push_back(total);
    total += p.cols();
  }
  Tensor out(rows, total);
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Tensor& v = parts[k].value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(v.row(r).begin(), v.row(r).end(), out.row(r).begin() + offsets[k]);
    }
  }
  Tape::BackwardFn fn = [idx, offsets](Tape& tp, const Tensor& g) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (!tp.requires_grad(Var{&tp, idx[k]})) continue;
      Tensor& d = tp.grad_buffer(idx[k]);
      for (std::size_t r = 0; r < d.rows(); ++r) {
        auto gr = g.row(r);
        auto dr = d.row(r);
        for (std::size_t c = 0; c < dr.size(); ++c) dr[c] += gr[offsets[k] + c];
      }
    }
  };
  return t.push(std::move(out), parts, std::move(fn));
}

Var leaky_relu(Var a, double slope) {
  Tensor out = a.value();
  for (double& x : out.data()) x = x > 0.0 ? x : slope * x;
  const std::size_t ia = a.index;
  return tape_of(a).push(std::move(out), {a}, [ia, slope](Tape& tp, const Tensor& g) {
    const Tensor& x = tp.value(Var{&tp, ia});
    Tensor& d = tp.grad_buffer(ia);
    auto xs = x.data();
    auto gs = g.data();
    auto ds = d.data();
    for (std::size_t i = 0; i < xs.size(); ++i) ds[i] += xs[i] > 0.0 ? gs[i] : slope * gs[i];
  });
}

Var dropout(Var a, double rate, std::mt19937_64& rng, bool training) {
  if (!(rate >= 0.0 && rate < 1.0)) throw Error(ErrorKind::kInvalidArgument, "dropout rate");
  if (!training || rate == 0.0) return a;
  const double scale = 1.0 / (1.0 - rate);
  auto mask = std::make_shared<std::vector<double>>(a.value().size());
  for (double& m : *mask) m = uniform01(rng) < rate ? 0.0 : scale;
  Tensor out = a.value();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= (*mask)[i];
  const std::size_t ia = a.index;
  return tape_of(a).push(std::move(out), {a}, [ia, mask](Tape& tp, const Tensor& g) {
    auto d = tp.grad_buffer(ia).data();
    auto gs = g.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += gs[i] * (*mask)[i];
  });
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (double& x : out.data()) x = stable_sigmoid(x);
  const std::size_t ia = a.index;
  Tape& t = tape_of(a);
  const std::size_t io = t.size();
  return t.push(std::move(out), {a}, [ia, io](Tape& tp, const Tensor& g) {
    auto y = tp.value(Var{&tp, io}).data();
    auto d = tp.grad_buffer(ia).data();
    auto gs = g.data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += gs[i] * y[i] * (1.0 - y[i]);
  });
}

Var masked_softmax(Var a, const Mask& mask) {
  const Tensor& x = a.value();
  if (mask.rows != x.rows() || mask.cols != x.cols() || mask.keep.size() != x.size()) {
    throw Error(ErrorKind::kShapeMismatch, "masked_softmax mask shape");
  }
  Tensor out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    double hi = -std::numeric_limits<double>::infinity();
    bool any = false;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask(r, c)) {
        hi = std::max(hi, x(r, c));
        any = true;
      }
    }
    if (!any) throw Error(ErrorKind::kEmptySoftmaxRow, "row " + std::to_string(r));
    double z = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask(r, c)) {
        out(r, c) = std::exp(x(r, c) - hi);
        z += out(r, c);
      }
    }
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) /= z;
  }
  const std::size_t ia = a.index;
  Tape& t = tape_of(a);
  const std::size_t io = t.size();
  return t.push(std::move(out), {a}, [ia, io](Tape& tp, const Tensor& g) {
    const Tensor& y = tp.value(Var{&tp, io});
    Tensor& d = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < y.rows(); ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < y.cols(); ++c) dot += g(r, c) * y(r, c);
      for (std::size_t c = 0; c < y.cols(); ++c) d(r, c) += y(r, c) * (g(r, c) - dot);
    }
  });
}

Var segment_softmax(Var a, std::span<const std::size_t> segments, std::size_t num_segments) {
  const Tensor& x = a.value();
  if (x.cols() != 1 || x.rows() != segments.size()) {
    throw Error(ErrorKind::kShapeMismatch, "segment_softmax expects E x 1 scores");
  }
  std::vector<double> hi(num_segments, -std::numeric_limits<double>::infinity());
  std::vector<double> z(num_segments, 0.0);
  for (std::size_t e = 0; e < segments.size(); ++e) {
    if (segments[e] >= num_segments) throw Error(ErrorKind::kShapeMismatch, "segment index");
    hi[segments[e]] = std::max(hi[segments[e]], x(e, 0));
  }
  Tensor out(x.rows(), 1);
  for (std::size_t e = 0; e < segments.size(); ++e) {
    out(e, 0) = std::exp(x(e, 0) - hi[segments[e]]);
    z[segments[e]] += out(e, 0);
  }
  for (std::size_t e = 0; e < segments.size(); ++e) out(e, 0) /= z[segments[e]];

  auto seg = std::make_shared<std::vector<std::size_t>>(segments.begin(), segments.end());
  const std::size_t ia = a.index;
  Tape& t = tape_of(a);
  const std::size_t io = t.size();
  return t.push(std::move(out), {a}, [ia, io, seg, num_segments](Tape& tp, const Tensor& g) {
    const Tensor& y = tp.value(Var{&tp, io});
    std::vector<double> dot(num_segments, 0.0);
    for (std::size_t e = 0; e < seg->size(); ++e) dot[(*seg)[e]] += g(e, 0) * y(e, 0);
    Tensor& d = tp.grad_buffer(ia);
    for (std::size_t e = 0; e < seg->size(); ++e) d(e, 0) += y(e, 0) * (g(e, 0) - dot[(*seg)[e]]);
  });
}

Var gather_rows(Var a, std::span<const std::size_t> indices) {
  const Tensor& x = a.value();
  Tensor out(indices.size(), x.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= x.rows()) throw Error(ErrorKind::kShapeMismatch, "gather index out of range");
    std::copy(x.row(indices[i]).begin(), x.row(indices[i]).end(), out.row(i).begin());
  }
  auto idx = std::make_shared<std::vector<std::size_t>>(indices.begin(), indices.end());
  const std::size_t ia = a.index;
  return tape_of(a).push(std::move(out), {a}, [ia, idx](Tape& tp, const Tensor& g) {
    Tensor& d = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < idx->size(); ++i) {
      auto gr = g.row(i);
      auto dr = d.row((*idx)[i]);
      for (std::size_t c = 0; c < gr.size(); ++c) dr[c] += gr[c];
    }
  });
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  const Tensor& x = a.value();
  if (rows * cols != x.size()) throw Error(ErrorKind::kShapeMismatch, "reshape changes element count");
  const std::size_t ia = a.index;
  return tape_of(a).push(Tensor(rows, cols, x.values()), {a}, [ia](Tape& tp, const Tensor& g) {
    Tensor& d = tp.grad_buffer(ia);
    for (std::size_t i = 0; i < g.size(); ++i) d.data()[i] += g.data()[i];
  });
}

Var transpose(Var a) {
  const std::size_t ia = a.index;
  return tape_of(a).push(a.value().transposed(), {a}, [ia](Tape& tp, const Tensor& g) {
    Tensor& d = tp.grad_buffer(ia);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) d(c, r) += g(r, c);
    }
  });
}

Var edge_scores(Var s, std::span<const std::size_t> dst, std::span<const std::size_t> src) {
  const Tensor& x = s.value();
  if (x.cols() != 2 || dst.size() != src.size()) throw Error(ErrorKind::kShapeMismatch, "edge_scores shapes");
  Tensor out(dst.size(), 1);
  for (std::size_t e = 0; e < dst.size(); ++e) {
    if (dst[e] >= x.rows() || src[e] >= x.rows()) throw Error(ErrorKind::kShapeMismatch, "edge index out of range");
    out(e, 0) = x(dst[e], 0) + x(src[e], 1);
  }
  auto d_idx = std::make_shared<std::vector<std::size_t>>(dst.begin(), dst.end());
  auto s_idx = std::make_shared<std::vector<std::size_t>>(src.begin(), src.end());
  const std::size_t is = s.index;
  return tape_of(s).push(std::move(out), {s}, [is, d_idx, s_idx](Tape& tp, const Tensor& g) {
    Tensor& d = tp.grad_buffer(is);
    for (std::size_t e = 0; e < d_idx->size(); ++e) {
      d((*d_idx)[e], 0) += g(e, 0);
      d((*s_idx)[e], 1) += g(e, 0);
    }
  });
}

Var scatter_reduce(Var a, std::span<const std::size_t> indices, std::size_t num_segments, Reduce mode) {
  const Tensor& x = a.value();
  if (indices.size() != x.rows()) throw Error(ErrorKind::kShapeMismatch, "scatter_reduce indices");
  const std::size_t n = x.cols();
  Tensor out(num_segments, n);
  std::vector<std::size_t> count(num_segments, 0);
  // argmax[s * n + c] = source row chosen for max
  auto argmax = std::make_shared<std::vector<std::size_t>>();
  if (mode == Reduce::kMax) argmax->assign(num_segments * n, 0);
  for (std::size_t e = 0; e < indices.size(); ++e) {
    const std::size_t s = indices[e];
    if (s >= num_segments) throw Error(ErrorKind::kShapeMismatch, "scatter segment out of range");
    auto xr = x.row(e);
    auto orow = out.row(s);
    if (mode == Reduce::kMax) {
      for (std::size_t c = 0; c < n; ++c) {
        if (count[s] == 0 || xr[c] > orow[c]) {
          orow[c] = xr[c];
          (*argmax)[s * n + c] = e;
        }
      }
    } else {
      for (std::size_t c = 0; c < n; ++c) orow[c] += xr[c];
    }
    ++count[s];
  }
  if (mode == Reduce::kMean) {
    for (std::size_t s = 0; s < num_segments; ++s) {
      if (count[s] == 0) continue;
      for (double& v : out.row(s)) v /= static_cast<double>(count[s]);
    }
  }
  auto idx = std::make_shared<std::vector<std::size_t>>(indices.begin(), indices.end());
  auto cnt = std::make_shared<std::vector<std::size_t>>(std::move(count));
  const std::size_t ia = a.index;
  return tape_of(a).push(std::move(out), {a}, [ia, idx, cnt, argmax, mode, n](Tape& tp, const Tensor& g) {
    Tensor& d = tp.grad_buffer(ia);
    if (mode == Reduce::kMax) {
      for (std::size_t s = 0; s < cnt->size(); ++s) {
        if ((*cnt)[s] == 0) continue;
        for (std::size_t c = 0; c < n; ++c) d((*argmax)[s * n + c], c) += g(s, c);
      }
      return;
    }
    for (std::size_t e = 0; e < idx->size(); ++e) {
      const std::size_t s = (*idx)[e];
      const double w = mode == Reduce::kMean ? 1.0 / static_cast<double>((*cnt)[s]) : 1.0;
      auto gr = g.row(s);
      auto dr = d.row(e);
      for (std::size_t c = 0; c < n; ++c) dr[c] += w * gr[c];
    }
  });
}

Var scale_rows(Var a, Var w) {
  const Tensor& x = a.value();
  const Tensor& wv = w.value();
  if (wv.cols() != 1 || wv.rows() != x.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "scale_rows: " + shape_str(x) + " by " + shape_str(wv));
  }
  Tensor out = x;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    const double s = wv(r, 0);
    for (double& v : out.row(r)) v *= s;
  }
  const std::size_t ia = a.index, iw = w.index;
  return tape_of(a).push(std::move(out), {a, w}, [ia, iw](Tape& tp, const Tensor& g) {
    const Tensor& xv = tp.value(Var{&tp, ia});
    const Tensor& sv = tp.value(Var{&tp, iw});
    if (tp.requires_grad(Var{&tp, ia})) {
      Tensor& d = tp.grad_buffer(ia);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        auto gr = g.row(r);
        auto dr = d.row(r);
        for (std::size_t c = 0; c < gr.size(); ++c) dr[c] += sv(r, 0) * gr[c];
      }
    }
    if (tp.requires_grad(Var{&tp, iw})) {
      Tensor& d = tp.grad_buffer(iw);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        double acc = 0.0;
        auto gr = g.row(r);
        auto xr = xv.row(r);
        for (std::size_t c = 0; c < gr.size(); ++c) acc += gr[c] * xr[c];
        d(r, 0) += acc;
      }
    }
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const std::size_t ia = a.index;
  return tape_of(a).push(Tensor::scalar(s), {a}, [ia](Tape& tp, const Tensor& g) {
    const double gv = g(0, 0);
    for (double& d : tp.grad_buffer(ia).data()) d += gv;
  });
}

Var mean(Var a) {
  const double n = static_cast<double>(a.value().size());
  if (n == 0) throw Error(ErrorKind::kShapeMismatch, "mean of empty tensor");
  double s = 0.0;
  for (double v : a.value().data()) s += v;
  const std::size_t ia = a.index;
  return tape_of(a).push(Tensor::scalar(s / n), {a}, [ia, n](Tape& tp, const Tensor& g) {
    const double gv = g(0, 0) / n;
    for (double& d : tp.grad_buffer(ia).data()) d += gv;
  });
}

Var bce_with_logits(Var logits, std::span<const double> labels, double pos_weight) {
  const Tensor& z = logits.value();
  if (z.cols() != 1 || z.rows() != labels.size()) {
    throw Error(ErrorKind::kShapeMismatch,
                "bce: logits " + shape_str(z) + " vs " + std::to_string(labels.size()) + " labels");
  }
  if (!(pos_weight > 0.0)) throw Error(ErrorKind::kInvalidArgument, "pos_weight must be > 0");
  if (labels.empty()) throw Error(ErrorKind::kShapeMismatch, "bce on empty batch");
  const double n = static_cast<double>(labels.size());
  double total = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double y = labels[i];
    total += pos_weight * y * softplus(-z(i, 0)) + (1.0 - y) * softplus(z(i, 0));
  }
  auto y = std::make_shared<std::vector<double>>(labels.begin(), labels.end());
  const std::size_t il = logits.index;
  return tape_of(logits).push(Tensor::scalar(total / n), {logits},
                              [il, y, pos_weight, n](Tape& tp, const Tensor& g) {
                                const Tensor& zv = tp.value(Var{&tp, il});
                                Tensor& d = tp.grad_buffer(il);
                                const double gv = g(0, 0) / n;
                                for (std::size_t i = 0; i < y->size(); ++i) {
                                  const double s = stable_sigmoid(zv(i, 0));
                                  const double yi = (*y)[i];
                                  d(i, 0) += gv * (-pos_weight * yi * (1.0 - s) + (1.0 - yi) * s);
                                }
                              });
}

}  // namespace citetrend::ad
