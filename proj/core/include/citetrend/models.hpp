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
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "citetrend/autodiff.hpp"
#include "citetrend/features.hpp"
#include "citetrend/graph.hpp"

namespace citetrend::nn {

enum class Mode { kTrain, kEval };

/// Per-row message-passing neighborhoods over a RowLayout. Each list starts
/// with the row itself followed by the rows it cites in ascending order.
/// `dst` / `src` flatten the lists row by row.
struct Neighborhoods {
  std::vector<std::vector<std::size_t>> lists;
  std::vector<std::size_t> dst;
  std::vector<std::size_t> src;

  std::size_t rows() const noexcept { return lists.size(); }
  std::size_t edge_count() const noexcept { return dst.size(); }
  static Neighborhoods from_lists(std::vector<std::vector<std::size_t>> lists);
};

/// Builds self-inclusive neighborhoods for the split's RowLayout. Throws
/// CausalityViolation if any edge would let a target row feed a prior row
/// (or a target row feed another target row).
Neighborhoods build_neighborhoods(const YearSplit& split);

struct ModelConfig {
  std::size_t text_width = 0;
  std::size_t affiliation_width = 0;
  std::size_t year_width = 2;
  std::size_t text_units = 100;
  std::size_t affiliation_units = 100;
  std::size_t year_units = 2;
  std::size_t hidden_units = 202;
  std::size_t output_units = 30;
  double dropout = 0.1;
  double leaky_slope = 0.01;
  std::uint64_t seed = 0;

  std::size_t embedding_width() const noexcept { return text_units + affiliation_units + year_units; }
  static ModelConfig for_features(const FeatureSet& features, std::uint64_t seed);
  bool operator==(const ModelConfig&) const = default;
};

/// Affine layer x W + b with Glorot-uniform W and zero b.
class Dense {
 public:
  Dense() = default;
  Dense(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng);

  ad::Var apply(ad::Tape& tape, ad::Var x);
  ad::Var apply_sparse(ad::Tape& tape, const SparseMatrix& x);
  void collect(std::vector<ad::Parameter*>& out) { out.push_back(&weight); out.push_back(&bias); }

  ad::Parameter weight;
  ad::Parameter bias;
};

/// Single-head graph attention layer. For row i with neighborhood N(i):
///   e_ij  = leaky_relu(a . [W x_i, W x_j] + c)
///   alpha = softmax of e_i. over N(i)
///   out_i = sum_j alpha_ij W x_j + b
class GatLayer {
 public:
  GatLayer() = default;
  GatLayer(const std::string& name, std::size_t in, std::size_t out, std::mt19937_64& rng);

  /// Full layer over every row of `x`; returns the pre-activation output.
  ad::Var apply(ad::Tape& tape, ad::Var x, const Neighborhoods& nb, double slope,
                ad::Var* attention = nullptr);
  /// Attention and aggregation on already projected rows `projected`.
  /// Edge k contributes projected[src[k]] to output row segment[k]; its score
  /// uses projected[dst[k]] as the receiving side.
  ad::Var attend(ad::Tape& tape, ad::Var projected, std::span<const std::size_t> dst,
                 std::span<const std::size_t> src, std::span<const std::size_t> segment,
                 std::size_t num_segments, double slope, ad::Var* attention = nullptr);
  void collect(std::vector<ad::Parameter*>& out);

  ad::Parameter weight;        // in x out
  ad::Parameter scorer;        // 2 out x 1
  ad::Parameter scorer_bias;   // 1 x 1
  ad::Parameter bias;          // 1 x out
};

/// Text, affiliation and year embeddings, each affine + leaky_relu + dropout,
/// concatenated to `embedding_width()` columns.
class EmbeddingStacks {
 public:
  EmbeddingStacks() = default;
  EmbeddingStacks(const ModelConfig& cfg, std::mt19937_64& rng);

  ad::Var apply(ad::Tape& tape, const FeatureSet& features, Mode mode, std::mt19937_64& rng,
                const ModelConfig& cfg);
  void collect(std::vector<ad::Parameter*>& out);

  Dense text;
  Dense affiliation;
  Dense year;
};

/// Common interface of every node classifier; forward returns one logit per
/// feature row (rows x 1).
class NodeClassifier {
 public:
  virtual ~NodeClassifier() = default;

  virtual std::string_view kind() const = 0;
  virtual ad::Var forward(ad::Tape& tape, const FeatureSet& features, const Neighborhoods& nb,
                          Mode mode, std::mt19937_64& rng) = 0;
  virtual std::vector<ad::Parameter*> parameters() = 0;

  std::vector<const ad::Parameter*> parameters() const;
  const ModelConfig& config() const noexcept { return config_; }

  /// Eval-mode logits without gradient recording.
  Tensor predict(const FeatureSet& features, const Neighborhoods& nb);

 protected:
  explicit NodeClassifier(ModelConfig cfg) : config_(std::move(cfg)) {}
  ModelConfig config_;
};

std::size_t count_parameters(const NodeClassifier& model);

/// Activations cached by the prior stage, indexed by prior row.
struct PriorCache {
  std::size_t text_width = 0;
  std::size_t affiliation_width = 0;
  std::vector<std::size_t> nodes;                        // prior row -> graph index
  std::unordered_map<std::size_t, std::size_t> row_of;   // graph index -> prior row
  Tensor layer1_projected;
  Tensor layer1;
  Tensor layer2_projected;
  Tensor layer2;
};

/// New nodes to score against a cached prior stage. `cited[r]` lists the
/// graph indices of prior nodes cited by row r.
struct TargetBatch {
  FeatureSet features;
  std::vector<std::vector<std::size_t>> cited;
};

/// Target rows of `features` with their E_t citations.
TargetBatch make_target_batch(const FeatureSet& features, const YearSplit& split);

struct TargetPrediction {
  Tensor logits;
  std::size_t layer1_rows = 0;  // rows pushed through the first layer's projection
};

/// Causality-masked graph attention trend model.
class TrendModel final : public NodeClassifier {
 public:
  explicit TrendModel(const ModelConfig& cfg);

  std::string_view kind() const override { return "gnn"; }
  ad::Var forward(ad::Tape& tape, const FeatureSet& features, const Neighborhoods& nb, Mode mode,
                  std::mt19937_64& rng) override;
  std::vector<ad::Parameter*> parameters() override;

  struct Activations {
    Tensor layer1;
    Tensor layer2;
    Tensor logits;
    Tensor attention1;
    Tensor attention2;
  };
  /// Eval-mode forward keeping intermediate activations.
  Activations activations(const FeatureSet& features, const Neighborhoods& nb);

  /// Runs the prior rows (layout rows before prior_count) through both
  /// attention layers and caches the results.
  PriorCache prior_stage(const FeatureSet& features, const Neighborhoods& nb);
  /// Applies the attention layers to new rows only, reading prior rows from
  /// the cache. Equals the full eval-mode forward bit for bit.
  TargetPrediction predict_targets(const PriorCache& cache, const TargetBatch& batch);

  EmbeddingStacks stacks;
  GatLayer layer1;
  GatLayer layer2;
  Dense head;

 private:
  ad::Var run(ad::Tape& tape, const FeatureSet& features, const Neighborhoods& nb, Mode mode,
              std::mt19937_64& rng, Activations* keep);
};

/// MLP variant: the attention layers become dense layers whose widths are
/// chosen so the trainable parameter count matches TrendModel exactly.
class MlpBaseline final : public NodeClassifier {
 public:
  explicit MlpBaseline(const ModelConfig& cfg);

  std::string_view kind() const override { return "mlp"; }
  ad::Var forward(ad::Tape& tape, const FeatureSet& features, const Neighborhoods& nb, Mode mode,
                  std::mt19937_64& rng) override;
  std::vector<ad::Parameter*> parameters() override;

  std::size_t hidden_width() const noexcept { return hidden1_; }
  std::size_t output_width() const noexcept { return hidden2_; }

  /// Smallest widening (h1 >= hidden_units, h2 >= output_units) that gives
  /// exact parameter parity; throws ParameterParity if none exists.
  static std::pair<std::size_t, std::size_t> parity_widths(const ModelConfig& cfg);

  EmbeddingStacks stacks;
  Dense layer1;
  Dense layer2;
  Dense head;

 private:
  std::size_t hidden1_ = 0;
  std::size_t hidden2_ = 0;
};

/// Single affine layer over the flattened [text | affiliation | year] row.
class LogisticBaseline final : public NodeClassifier {
 public:
  explicit LogisticBaseline(const ModelConfig& cfg);

  std::string_view kind() const override { return "logistic"; }
  ad::Var forward(ad::Tape& tape, const FeatureSet& features, const Neighborhoods& nb, Mode mode,
                  std::mt19937_64& rng) override;
  std::vector<ad::Parameter*> parameters() override;

  ad::Parameter text_weight;
  ad::Parameter affiliation_weight;
  ad::Parameter year_weight;
  ad::Parameter bias;
};

std::unique_ptr<NodeClassifier> make_model(std::string_view kind, const ModelConfig& cfg);

/// Copies TrendModel weights into an MLP so that, with self-only
/// neighborhoods, both produce the same eval-mode logits. Extra MLP units get
/// zero weights.
void map_to_mlp(const TrendModel& gnn, MlpBaseline& mlp);

/// Parameters in declaration order, flattened into one buffer.
std::vector<double> flatten_parameters(const NodeClassifier& model);

}  // namespace citetrend::nn
