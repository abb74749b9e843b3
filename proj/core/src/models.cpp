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

#include "citetrend/models.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "citetrend/error.hpp"
#include "citetrend/random.hpp"

namespace citetrend::nn {

namespace {

Tensor glorot(std::size_t in, std::size_t out, std::mt19937_64& rng) {
  Tensor w(in, out);
  const double fan = static_cast<double>(in + out);
  const double limit = fan > 0 ? std::sqrt(6.0 / fan) : 0.0;
  for (double& v : w.data()) v = (2.0 * uniform01(rng) - 1.0) * limit;
  return w;
}

Tensor vstack(const Tensor& top, const Tensor& bottom) {
  if (top.cols() != bottom.cols() && top.rows() != 0) {
    throw Error(ErrorKind::kShapeMismatch, "vstack column counts differ");
  }
  const std::size_t cols = bottom.cols();
  std::vector<double> data;
  data.reserve((top.rows() + bottom.rows()) * cols);
  data.insert(data.end(), top.data().begin(), top.data().end());
  data.insert(data.end(), bottom.data().begin(), bottom.data().end());
  return Tensor(top.rows() + bottom.rows(), cols, std::move(data));
}

void check_features(const ModelConfig& cfg, const FeatureSet& f) {
  if (f.text.cols != cfg.text_width || f.affiliation.cols != cfg.affiliation_width ||
      f.year.cols() != cfg.year_width) {
    throw Error(ErrorKind::kShapeMismatch,
                "feature widths (" + std::to_string(f.text.cols) + "," +
                    std::to_string(f.affiliation.cols) + "," + std::to_string(f.year.cols()) +
                    ") do not match model (" + std::to_string(cfg.text_width) + "," +
                    std::to_string(cfg.affiliation_width) + "," + std::to_string(cfg.year_width) + ")");
  }
  if (f.text.rows != f.rows() || f.affiliation.rows != f.rows() || f.year.rows() != f.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "feature blocks disagree on row count");
  }
}

void check_neighborhoods(const FeatureSet& f, const Neighborhoods& nb) {
  if (nb.rows() != f.rows()) {
    throw Error(ErrorKind::kShapeMismatch, "neighborhoods cover " + std::to_string(nb.rows()) +
                                               " rows, features " + std::to_string(f.rows()));
  }
}

ad::Var activate(ad::Var x, const ModelConfig& cfg, Mode mode, std::mt19937_64& rng) {
  return ad::dropout(ad::leaky_relu(x, cfg.leaky_slope), cfg.dropout, rng, mode == Mode::kTrain);
}

void copy_block(const Tensor& src, Tensor& dst) {
  dst.fill(0.0);
  for (std::size_t r = 0; r < src.rows(); ++r) {
    for (std::size_t c = 0; c < src.cols(); ++c) dst(r, c) = src(r, c);
  }
}

}  // namespace

// ---- neighborhoods ---------------------------------------------------------

Neighborhoods Neighborhoods::from_lists(std::vector<std::vector<std::size_t>> lists) {
  Neighborhoods nb;
  nb.lists = std::move(lists);
  for (std::size_t r = 0; r < nb.lists.size(); ++r) {
    for (std::size_t s : nb.lists[r]) {
      if (s >= nb.lists.size()) throw Error(ErrorKind::kShapeMismatch, "neighbor row out of range");
      nb.dst.push_back(r);
      nb.src.push_back(s);
    }
  }
  return nb;
}

Neighborhoods build_neighborhoods(const YearSplit& split) {
  const RowLayout layout = RowLayout::from_split(split);
  std::vector<std::vector<std::size_t>> cited(layout.size());
  auto row = [&](std::size_t node) {
    auto it = layout.row_of.find(node);
    if (it == layout.row_of.end()) {
      throw Error(ErrorKind::kCausalityViolation, "edge endpoint " + std::to_string(node) + " outside the split");
    }
    return it->second;
  };
  for (const Edge& e : split.prior_edges) {
    const std::size_t from = row(e.citing), to = row(e.cited);
    if (layout.is_target_row(from) || layout.is_target_row(to)) {
      throw Error(ErrorKind::kCausalityViolation, "prior edge touches a target node");
    }
    cited[from].push_back(to);
  }
  for (const Edge& e : split.target_edges) {
    const std::size_t from = row(e.citing), to = row(e.cited);
    if (!layout.is_target_row(from) || layout.is_target_row(to)) {
      throw Error(ErrorKind::kCausalityViolation, "target edge must run from a target to a prior node");
    }
    cited[from].push_back(to);
  }
  std::vector<std::vector<std::size_t>> lists(layout.size());
  for (std::size_t r = 0; r < layout.size(); ++r) {
    auto& c = cited[r];
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
    lists[r].reserve(c.size() + 1);
    lists[r].push_back(r);
    lists[r].insert(lists[r].end(), c.begin(), c.end());
  }
  return Neighborhoods::from_lists(std::move(lists));
}

ModelConfig ModelConfig::for_features(const FeatureSet& features, std::uint64_t seed) {
  ModelConfig cfg;
  cfg.text_width = features.text.cols;
  cfg.affiliation_width = features.affiliation.cols;
  cfg.year_width = features.year.cols();
  cfg.seed = seed;
  return cfg;
}

// ---- layers ----------------------------------------------------------------

Dense::Dense(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng)
    : weight(name + ".weight", glorot(in, out, rng)), bias(name + ".bias", Tensor(1, out)) {}

ad::Var Dense::apply(ad::Tape& tape, ad::Var x) {
  return ad::add_row(ad::matmul(x, tape.parameter(weight)), tape.parameter(bias));
}

ad::Var Dense::apply_sparse(ad::Tape& tape, const SparseMatrix& x) {
  return ad::add_row(ad::spmm(x, tape.parameter(weight)), tape.parameter(bias));
}

GatLayer::GatLayer(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng)
    : weight(name + ".weight", glorot(in, out, rng)),
      scorer(name + ".scorer", glorot(2 * out, 1, rng)),
      scorer_bias(name + ".scorer_bias", Tensor(1, 1)),
      bias(name + ".bias", Tensor(1, out)) {}

void GatLayer::collect(std::vector<ad::Parameter*>& out) {
  out.push_back(&weight);
  out.push_back(&scorer);
  out.push_back(&scorer_bias);
  out.push_back(&bias);
}

ad::Var GatLayer::apply(ad::Tape& tape, ad::Var x, const Neighborhoods& nb, double slope, ad::Var* attention) {
  ad::Var projected = ad::matmul(x, tape.parameter(weight));
  return attend(tape, projected, nb.dst, nb.src, nb.dst, nb.rows(), slope, attention);
}

ad::Var GatLayer::attend(ad::Tape& tape, ad::Var projected, std::span<const std::size_t> dst,
                         std::span<const std::size_t> src, std::span<const std::size_t> segment,
                         std::size_t num_segments, double slope, ad::Var* attention) {
  // a . [h_i, h_j] splits into (H a_top)_i + (H a_bottom)_j.
  const std::size_t width = projected.value().cols();
  ad::Var halves = ad::transpose(ad::reshape(tape.parameter(scorer), 2, width));
  ad::Var node_scores = ad::matmul(projected, halves);
  ad::Var score = ad::add_row(ad::edge_scores(node_scores, dst, src), tape.parameter(scorer_bias));
  ad::Var sender = ad::gather_rows(projected, src);
  ad::Var alpha = ad::segment_softmax(ad::leaky_relu(score, slope), segment, num_segments);
  if (attention != nullptr) *attention = alpha;
  ad::Var messages = ad::scale_rows(sender, alpha);
  ad::Var pooled = ad::scatter_reduce(messages, segment, num_segments, ad::Reduce::kSum);
  return ad::add_row(pooled, tape.parameter(bias));
}

EmbeddingStacks::EmbeddingStacks(const ModelConfig& cfg, std::mt19937_64& rng)
    : text("stacks.text", cfg.text_width, cfg.text_units, rng),
      affiliation("stacks.affiliation", cfg.affiliation_width, cfg.affiliation_units, rng),
      year("stacks.year", cfg.year_width, cfg.year_units, rng) {}

ad::Var EmbeddingStacks::apply(ad::Tape& tape, const FeatureSet& features, Mode mode, std::mt19937_64& rng,
                               const ModelConfig& cfg) {
  const ad::Var parts[] = {
      activate(text.apply_sparse(tape, features.text), cfg, mode, rng),
      activate(affiliation.apply_sparse(tape, features.affiliation), cfg, mode, rng),
      activate(year.apply(tape, tape.constant(features.year)), cfg, mode, rng),
  };
  return ad::concat(parts);
}

void EmbeddingStacks::collect(std::vector<ad::Parameter*>& out) {
  text.collect(out);
  affiliation.collect(out);
  year.collect(out);
}

// ---- classifier base -------------------------------------------------------

std::vector<const ad::Parameter*> NodeClassifier::parameters() const {
  auto mut = const_cast<NodeClassifier*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

Tensor NodeClassifier::predict(const FeatureSet& features, const Neighborhoods& nb) {
  ad::Tape tape(false);
  std::mt19937_64 rng(config_.seed);
  return forward(tape, features, nb, Mode::kEval, rng).value();
}

std::size_t count_parameters(const NodeClassifier& model) {
  std::size_t n = 0;
  for (const ad::Parameter* p : model.parameters()) n += p->value.size();
  return n;
}

std::vector<double> flatten_parameters(const NodeClassifier& model) {
  std::vector<double> out;
  for (const ad::Parameter* p : model.parameters()) {
    out.insert(out.end(), p->value.data().begin(), p->value.data().end());
  }
  return out;
}

// ---- trend model -----------------------------------------------------------

TrendModel::TrendModel(const ModelConfig& cfg) : NodeClassifier(cfg) {
  std::mt19937_64 rng(cfg.seed);
  stacks = EmbeddingStacks(cfg, rng);
  layer1 = GatLayer("layer1", cfg.embedding_width(), cfg.hidden_units, rng);
  layer2 = GatLayer("layer2", cfg.hidden_units, cfg.output_units, rng);
  head = Dense("head", cfg.output_units, 1, rng);
}

std::vector<ad::Parameter*> TrendModel::parameters() {
  std::vector<ad::Parameter*> out;
  stacks.collect(out);
  layer1.collect(out);
  layer2.collect(out);
  head.collect(out);
  return out;
}

ad::Var TrendModel::run(ad::Tape& tape, const FeatureSet& features, const Neighborhoods& nb, Mode mode,
                        std::mt19937_64& rng, Activations* keep) {
  check_features(config_, features);
  check_neighborhoods(features, nb);
  const double slope = config_.leaky_slope;
  ad::Var x = stacks.apply(tape, features, mode, rng, config_);
  ad::Var a1, a2;
  ad::Var z1 = activate(layer1.apply(tape, x, nb, slope, &a1), config_, mode, rng);
  ad::Var z2 = activate(layer2.apply(tape, z1, nb, slope, &a2), config_, mode, rng);
  ad::Var logits = head.apply(tape, z2);
  if (keep != nullptr) {
    keep->layer1 = z1.value();
    keep->layer2 = z2.value();
    keep->logits = logits.value();
    keep->attention1 = a1.value();
    keep->attention2 = a2.value();
  }
  return logits;
}

ad::Var TrendModel::forward(ad::Tape& tape, const FeatureSet& features, const Neighborhoods& nb, Mode mode,
                            std::mt19937_64& rng) {
  return run(tape, features, nb, mode, rng, nullptr);
}

TrendModel::Activations TrendModel::activations(const FeatureSet& features, const Neighborhoods& nb) {
  ad::Tape tape(false);
  std::mt19937_64 rng(config_.seed);
  Activations acts;
  run(tape, features, nb, Mode::kEval, rng, &acts);
  return acts;
}

PriorCache TrendModel::prior_stage(const FeatureSet& features, const Neighborhoods& nb) {
  check_features(config_, features);
  check_neighborhoods(features, nb);
  const std::size_t np = features.layout.prior_count;
  std::vector<std::size_t> rows(np);
  std::iota(rows.begin(), rows.end(), 0);
  FeatureSet prior = features.select_rows(rows);
  std::vector<std::vector<std::size_t>> lists(nb.lists.begin(), nb.lists.begin() + static_cast<std::ptrdiff_t>(np));
  for (const auto& l : lists) {
    for (std::size_t s : l) {
      if (s >= np) throw Error(ErrorKind::kCausalityViolation, "prior neighborhood reaches a target row");
    }
  }
  Neighborhoods prior_nb = Neighborhoods::from_lists(std::move(lists));

  ad::Tape tape(false);
  std::mt19937_64 rng(config_.seed);
  const double slope = config_.leaky_slope;
  ad::Var x = stacks.apply(tape, prior, Mode::kEval, rng, config_);
  ad::Var h1 = ad::matmul(x, tape.parameter(layer1.weight));
  ad::Var z1 = ad::leaky_relu(
      layer1.attend(tape, h1, prior_nb.dst, prior_nb.src, prior_nb.dst, np, slope), slope);
  ad::Var h2 = ad::matmul(z1, tape.parameter(layer2.weight));
  ad::Var z2 = ad::leaky_relu(
      layer2.attend(tape, h2, prior_nb.dst, prior_nb.src, prior_nb.dst, np, slope), slope);

  PriorCache cache;
  cache.text_width = features.text.cols;
  cache.affiliation_width = features.affiliation.cols;
  cache.nodes = prior.layout.nodes;
  for (std::size_t r = 0; r < cache.nodes.size(); ++r) cache.row_of.emplace(cache.nodes[r], r);
  cache.layer1_projected = h1.value();
  cache.layer1 = z1.value();
  cache.layer2_projected = h2.value();
  cache.layer2 = z2.value();
  return cache;
}

TargetPrediction TrendModel::predict_targets(const PriorCache& cache, const TargetBatch& batch) {
  const FeatureSet& f = batch.features;
  if (f.text.cols != cache.text_width || f.affiliation.cols != cache.affiliation_width) {
    throw Error(ErrorKind::kCacheShapeMismatch, "target feature widths differ from the cached prior stage");
  }
  check_features(config_, f);
  const std::size_t nt = f.rows();
  if (batch.cited.size() != nt) throw Error(ErrorKind::kShapeMismatch, "one citation list per target row");
  const std::size_t np = cache.nodes.size();

  std::vector<std::size_t> dst, src, seg;
  for (std::size_t t = 0; t < nt; ++t) {
    std::vector<std::size_t> rows;
    for (std::size_t node : batch.cited[t]) {
      auto it = cache.row_of.find(node);
      if (it == cache.row_of.end()) {
        throw Error(ErrorKind::kUnknownCitedNode, "target cites node " + std::to_string(node) + " outside the prior cache");
      }
      rows.push_back(it->second);
    }
    std::sort(rows.begin(), rows.end());
    rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
    dst.push_back(np + t);
    src.push_back(np + t);
    seg.push_back(t);
    for (std::size_t r : rows) {
      dst.push_back(np + t);
      src.push_back(r);
      seg.push_back(t);
    }
  }

  ad::Tape tape(false);
  std::mt19937_64 rng(config_.seed);
  const double slope = config_.leaky_slope;
  ad::Var x = stacks.apply(tape, f, Mode::kEval, rng, config_);
  ad::Var h1_t = ad::matmul(x, tape.parameter(layer1.weight));
  ad::Var h1 = tape.constant(vstack(cache.layer1_projected, h1_t.value()));
  ad::Var z1_t = ad::leaky_relu(layer1.attend(tape, h1, dst, src, seg, nt, slope), slope);
  ad::Var h2_t = ad::matmul(z1_t, tape.parameter(layer2.weight));
  ad::Var h2 = tape.constant(vstack(cache.layer2_projected, h2_t.value()));
  ad::Var z2_t = ad::leaky_relu(layer2.attend(tape, h2, dst, src, seg, nt, slope), slope);
  ad::Var logits = head.apply(tape, z2_t);
  return TargetPrediction{logits.value(), nt};
}

TargetBatch make_target_batch(const FeatureSet& features, const YearSplit& split) {
  std::vector<std::size_t> rows;
  for (std::size_t r = features.layout.prior_count; r < features.rows(); ++r) rows.push_back(r);
  TargetBatch batch;
  batch.features = features.select_rows(rows);
  std::map<std::size_t, std::vector<std::size_t>> by_citing;
  for (const Edge& e : split.target_edges) by_citing[e.citing].push_back(e.cited);
  batch.cited.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto it = by_citing.find(batch.features.layout.nodes[i]);
    if (it != by_citing.end()) batch.cited[i] = it->second;
  }
  return batch;
}

// ---- MLP baseline ----------------------------------------------------------

std::pair<std::size_t, std::size_t> MlpBaseline::parity_widths(const ModelConfig& cfg) {
  const std::size_t e = cfg.embedding_width();
  const std::size_t h1 = cfg.hidden_units, h2 = cfg.output_units;
  // Attention layers beyond the shared stacks, plus the head.
  const std::size_t target = (e * h1 + h1 + 2 * h1 + 1) + (h1 * h2 + h2 + 2 * h2 + 1) + (h2 + 1);
  // Dense stack: e*a + a + a*b + b + (b + 1)
  // a shrinks as b grows, so stop once a would drop below h1.
  for (std::size_t b = h2;; ++b) {
    const std::size_t fixed = 2 * b + 1;
    if (target < fixed) break;
    const std::size_t denom = e + 1 + b;
    const std::size_t a = (target - fixed) / denom;
    if (a < h1) break;
    if ((target - fixed) % denom == 0) return {a, b};
  }
  throw Error(ErrorKind::kParameterParity,
              "no dense widths match the attention layers exactly for hidden=" + std::to_string(h1) +
                  ", output=" + std::to_string(h2));
}

MlpBaseline::MlpBaseline(const ModelConfig& cfg) : NodeClassifier(cfg) {
  std::tie(hidden1_, hidden2_) = parity_widths(cfg);
  std::mt19937_64 rng(cfg.seed);
  stacks = EmbeddingStacks(cfg, rng);
  layer1 = Dense("layer1", cfg.embedding_width(), hidden1_, rng);
  layer2 = Dense("layer2", hidden1_, hidden2_, rng);
  head = Dense("head", hidden2_, 1, rng);
}

std::vector<ad::Parameter*> MlpBaseline::parameters() {
  std::vector<ad::Parameter*> out;
  stacks.collect(out);
  layer1.collect(out);
  layer2.collect(out);
  head.collect(out);
  return out;
}

ad::Var MlpBaseline::forward(ad::Tape& tape, const FeatureSet& features, const Neighborhoods&, Mode mode,
                             std::mt19937_64& rng) {
  check_features(config_, features);
  ad::Var x = stacks.apply(tape, features, mode, rng, config_);
  ad::Var z1 = activate(layer1.apply(tape, x), config_, mode, rng);
  ad::Var z2 = activate(layer2.apply(tape, z1), config_, mode, rng);
  return head.apply(tape, z2);
}

void map_to_mlp(const TrendModel& gnn, MlpBaseline& mlp) {
  const ModelConfig& g = gnn.config();
  const ModelConfig& m = mlp.config();
  if (g.text_width != m.text_width || g.affiliation_width != m.affiliation_width ||
      g.embedding_width() != m.embedding_width() || mlp.hidden_width() < g.hidden_units ||
      mlp.output_width() < g.output_units) {
    throw Error(ErrorKind::kShapeMismatch, "map_to_mlp: incompatible model configurations");
  }
  mlp.stacks = gnn.stacks;
  copy_block(gnn.layer1.weight.value, mlp.layer1.weight.value);
  copy_block(gnn.layer1.bias.value, mlp.layer1.bias.value);
  copy_block(gnn.layer2.weight.value, mlp.layer2.weight.value);
  copy_block(gnn.layer2.bias.value, mlp.layer2.bias.value);
  copy_block(gnn.head.weight.value, mlp.head.weight.value);
  copy_block(gnn.head.bias.value, mlp.head.bias.value);
}

// ---- logistic baseline -----------------------------------------------------

LogisticBaseline::LogisticBaseline(const ModelConfig& cfg) : NodeClassifier(cfg) {
  std::mt19937_64 rng(cfg.seed);
  const std::size_t in = cfg.text_width + cfg.affiliation_width + cfg.year_width;
  Tensor w = glorot(in, 1, rng);
  auto slice = [&](std::size_t from, std::size_t n) {
    std::vector<double> v(w.data().begin() + static_cast<std::ptrdiff_t>(from),
                          w.data().begin() + static_cast<std::ptrdiff_t>(from + n));
    return Tensor(n, 1, std::move(v));
  };
  text_weight = ad::Parameter("logistic.text", slice(0, cfg.text_width));
  affiliation_weight = ad::Parameter("logistic.affiliation", slice(cfg.text_width, cfg.affiliation_width));
  year_weight = ad::Parameter("logistic.year", slice(cfg.text_width + cfg.affiliation_width, cfg.year_width));
  bias = ad::Parameter("logistic.bias", Tensor(1, 1));
}

std::vector<ad::Parameter*> LogisticBaseline::parameters() {
  return {&text_weight, &affiliation_weight, &year_weight, &bias};
}

ad::Var LogisticBaseline::forward(ad::Tape& tape, const FeatureSet& features, const Neighborhoods&, Mode,
                                  std::mt19937_64&) {
  check_features(config_, features);
  ad::Var z = ad::add(ad::spmm(features.text, tape.parameter(text_weight)),
                      ad::spmm(features.affiliation, tape.parameter(affiliation_weight)));
  z = ad::add(z, ad::matmul(tape.constant(features.year), tape.parameter(year_weight)));
  return ad::add_row(z, tape.parameter(bias));
}

std::unique_ptr<NodeClassifier> make_model(std::string_view kind, const ModelConfig& cfg) {
  if (kind == "gnn") return std::make_unique<TrendModel>(cfg);
  if (kind == "mlp") return std::make_unique<MlpBaseline>(cfg);
  if (kind == "logistic") return std::make_unique<LogisticBaseline>(cfg);
  throw Error(ErrorKind::kInvalidArgument, "unknown model kind '" + std::string(kind) + "'");
}

}  // namespace citetrend::nn
