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
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "citetrend/features.hpp"
#include "citetrend/graph.hpp"
#include "citetrend/models.hpp"

namespace citetrend {

// ---- metrics ---------------------------------------------------------------

struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> loss_trace;
};

/// Harmonic mean of precision and recall; 0 when both are 0.
double f1_score(double precision, double recall);
/// Precision, recall and F1 from counts, with 0 for any 0/0.
EvalReport report_from(const Confusion& c);
Confusion confusion_from(std::span<const int> predicted, std::span<const int> actual);

/// Thresholds sigmoid(logit) at 0.5 (logit > 0) on the given rows.
/// Throws EmptyEvaluationSet when `rows` is empty.
EvalReport evaluate(const Tensor& logits, std::span<const int> labels, std::span<const std::size_t> rows);

/// lambda = (1 / V_all) * (E_p / (E_all - E_p)) * 100; +infinity when
/// E_all == E_p.
double lambda_predictivity(std::size_t v_all, std::size_t e_all, std::size_t e_prior);
double lambda_predictivity(const YearSplit& split, const CitationGraph& graph);

// ---- training --------------------------------------------------------------

enum class PosWeightMode { kAuto, kFixed };

struct TrainConfig {
  std::size_t epochs = 150;
  double learning_rate = 1e-3;
  double weight_decay = 5e-4;
  double dropout = 0.1;
  double leaky_slope = 0.01;
  double percentile = 0.9;
  int window_years = 10;
  std::uint64_t seed = 0;
  PosWeightMode pos_weight_mode = PosWeightMode::kAuto;
  double fixed_pos_weight = 1.0;
  FeatureOptions features;

  void validate() const;
  bool operator==(const TrainConfig&) const = default;
};

/// Everything a model needs for one target year, in RowLayout order.
struct Dataset {
  YearSplit split;
  FeatureSet features;
  nn::Neighborhoods neighborhoods;
  TrendLabels labels;
  std::vector<int> row_labels;
  std::vector<std::size_t> train_rows;       // prior rows before the latest prior year
  std::vector<std::size_t> validation_rows;  // latest prior year
  std::vector<std::size_t> target_rows;
};

Dataset prepare_dataset(const CitationGraph& graph, int target_year, const TrainConfig& config);
/// Same dataset with a different edge set (features and labels are reused).
Dataset with_split(const Dataset& base, YearSplit split);

nn::ModelConfig model_config(const Dataset& data, const TrainConfig& config);

struct TrainResult {
  std::vector<double> loss_trace;
  double pos_weight = 1.0;
  EvalReport validation;
};

/// Full-batch Adam on the training rows. Throws Divergence (message carries
/// the epoch) on a non-finite loss.
TrainResult train(nn::NodeClassifier& model, const Dataset& data, const TrainConfig& config);

struct ModelRun {
  std::string model;
  std::uint64_t seed = 0;
  std::size_t parameters = 0;
  EvalReport report;
};

/// Builds, trains and evaluates one model kind on the target rows.
ModelRun run_model(std::string_view kind, const Dataset& data, const TrainConfig& config);

/// gnn, mlp and logistic runs under one config.
std::vector<ModelRun> compare_models(const Dataset& data, const TrainConfig& config);

struct AblationPoint {
  double fraction = 0.0;
  std::uint64_t seed = 0;
  double gnn_f1 = 0.0;
  double mlp_f1 = 0.0;
};

struct AblationCurve {
  std::vector<AblationPoint> points;  // sorted by fraction, then seed
};

/// Removes floor(f * |E|) edges of the split (a prefix of one seeded
/// permutation per seed, so removals are nested across fractions) and
/// retrains the GNN from scratch for every (fraction, seed). The MLP reads no
/// edges, so it is trained once per seed.
AblationCurve ablate_edges(const Dataset& data, std::span<const double> fractions,
                           std::span<const std::uint64_t> seeds, const TrainConfig& config);

/// The split with the first floor(fraction * |E|) edges of the seeded
/// permutation removed.
YearSplit remove_edges(const YearSplit& split, double fraction, std::uint64_t seed);

// ---- CSV -------------------------------------------------------------------

std::string format_fixed(double v);
void write_eval_csv(std::ostream& os, std::span<const ModelRun> runs);
void write_ablation_csv(std::ostream& os, const AblationCurve& curve);

}  // namespace citetrend
