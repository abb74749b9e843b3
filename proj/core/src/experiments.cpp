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

#include "citetrend/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>

#include "citetrend/error.hpp"
#include "citetrend/optim.hpp"
#include "citetrend/random.hpp"

namespace citetrend {

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * (precision * recall) / denom : 0.0;
}

EvalReport report_from(const Confusion& c) {
  EvalReport r;
  r.confusion = c;
  r.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  r.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  r.f1 = c.tp == 0 ? 0.0 : f1_score(r.precision, r.recall);
  return r;
}

Confusion confusion_from(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) throw Error(ErrorKind::kShapeMismatch, "prediction/label lengths");
  Confusion c;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] != 0, a = actual[i] != 0;
    if (p && a) ++c.tp;
    else if (p) ++c.fp;
    else if (a) ++c.fn;
    else ++c.tn;
  }
  return c;
}

EvalReport evaluate(const Tensor& logits, std::span<const int> labels, std::span<const std::size_t> rows) {
  if (rows.empty()) throw Error(ErrorKind::kEmptyEvaluationSet, "no rows to evaluate");
  std::vector<int> predicted, actual;
  predicted.reserve(rows.size());
  actual.reserve(rows.size());
  for (std::size_t r : rows) {
    // sigmoid(z) > 0.5 <=> z > 0
    predicted.push_back(logits(r, 0) > 0.0 ? 1 : 0);
    actual.push_back(labels[r]);
  }
  return report_from(confusion_from(predicted, actual));
}

double lambda_predictivity(std::size_t v_all, std::size_t e_all, std::size_t e_prior) {
  if (v_all == 0) throw Error(ErrorKind::kInvalidArgument, "lambda needs at least one node");
  if (e_prior > e_all) throw Error(ErrorKind::kInvalidArgument, "E_p exceeds E_all");
  if (e_all == e_prior) return std::numeric_limits<double>::infinity();
  return (1.0 / static_cast<double>(v_all)) *
         (static_cast<double>(e_prior) / static_cast<double>(e_all - e_prior)) * 100.0;
}

double lambda_predictivity(const YearSplit& split, const CitationGraph&) {
  return lambda_predictivity(split.node_count(), split.edge_count(), split.prior_edges.size());
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || weight_decay < 0.0 || dropout < 0.0 || dropout >= 1.0 ||
      !(leaky_slope > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "train config rates out of range");
  }
  if (!(percentile > 0.0 && percentile < 1.0)) throw Error(ErrorKind::kInvalidArgument, "percentile must lie in (0, 1)");
  if (window_years < 1) throw Error(ErrorKind::kInvalidArgument, "window_years must be >= 1");
  if (pos_weight_mode == PosWeightMode::kFixed && !(fixed_pos_weight > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "fixed pos_weight must be > 0");
  }
}

namespace {

void assign_rows(Dataset& d, const CitationGraph& graph) {
  const RowLayout& layout = d.features.layout;
  const int latest_prior = d.split.target_year - 1;
  d.train_rows.clear();
  d.validation_rows.clear();
  d.target_rows.clear();
  d.row_labels.assign(layout.size(), 0);
  for (std::size_t r = 0; r < layout.size(); ++r) {
    const std::size_t node = layout.nodes[r];
    d.row_labels[r] = d.labels.label(node);
    if (layout.is_target_row(r)) {
      d.target_rows.push_back(r);
    } else if (graph.node(node).year == latest_prior) {
      d.validation_rows.push_back(r);
    } else {
      d.train_rows.push_back(r);
    }
  }
  // A one-year window leaves nothing before the latest prior year.
  if (d.train_rows.empty()) {
    d.train_rows.swap(d.validation_rows);
  }
}

}  // namespace

Dataset prepare_dataset(const CitationGraph& graph, int target_year, const TrainConfig& config) {
  config.validate();
  Dataset d;
  d.split = split_by_year(graph, target_year, config.window_years);
  d.features = build_features(graph, d.split, config.features);
  d.neighborhoods = nn::build_neighborhoods(d.split);
  d.labels = label_by_percentile(graph, d.features.layout.nodes, config.percentile);
  assign_rows(d, graph);
  if (d.train_rows.empty()) throw Error(ErrorKind::kInvalidArgument, "split has no prior rows to train on");
  return d;
}

Dataset with_split(const Dataset& base, YearSplit split) {
  if (split.prior_nodes != base.split.prior_nodes || split.target_nodes != base.split.target_nodes) {
    throw Error(ErrorKind::kInvalidArgument, "with_split may only change edges");
  }
  Dataset d = base;
  d.split = std::move(split);
  d.neighborhoods = nn::build_neighborhoods(d.split);
  return d;
}

nn::ModelConfig model_config(const Dataset& data, const TrainConfig& config) {
  nn::ModelConfig cfg = nn::ModelConfig::for_features(data.features, config.seed);
  cfg.dropout = config.dropout;
  cfg.leaky_slope = config.leaky_slope;
  return cfg;
}

TrainResult train(nn::NodeClassifier& model, const Dataset& data, const TrainConfig& config) {
  config.validate();
  TrainResult result;
  std::vector<double> y;
  y.reserve(data.train_rows.size());
  std::size_t pos = 0;
  for (std::size_t r : data.train_rows) {
    y.push_back(static_cast<double>(data.row_labels[r]));
    pos += data.row_labels[r] != 0 ? 1 : 0;
  }
  const std::size_t neg = y.size() - pos;
  if (config.pos_weight_mode == PosWeightMode::kFixed) {
    result.pos_weight = config.fixed_pos_weight;
  } else {
    result.pos_weight = pos > 0 && neg > 0 ? static_cast<double>(neg) / static_cast<double>(pos) : 1.0;
  }

  ad::Adam adam(model.parameters(), ad::AdamConfig{.learning_rate = config.learning_rate,
                                                   .weight_decay = config.weight_decay});
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    ad::Tape tape;
    ad::Var logits = model.forward(tape, data.features, data.neighborhoods, nn::Mode::kTrain, rng);
    ad::Var loss = ad::bce_with_logits(ad::gather_rows(logits, data.train_rows), y, result.pos_weight);
    const double value = loss.value().item();
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::kDivergence, "non-finite loss at epoch " + std::to_string(epoch));
    }
    result.loss_trace.push_back(value);
    tape.backward(loss);
    adam.step();
  }

  if (!data.validation_rows.empty()) {
    const Tensor logits = model.predict(data.features, data.neighborhoods);
    result.validation = evaluate(logits, data.row_labels, data.validation_rows);
  }
  return result;
}

ModelRun run_model(std::string_view kind, const Dataset& data, const TrainConfig& config) {
  auto model = nn::make_model(kind, model_config(data, config));
  TrainResult tr = train(*model, data, config);
  const Tensor logits = model->predict(data.features, data.neighborhoods);
  ModelRun run;
  run.model = std::string(kind);
  run.seed = config.seed;
  run.parameters = nn::count_parameters(*model);
  run.report = evaluate(logits, data.row_labels, data.target_rows);
  run.report.loss_trace = std::move(tr.loss_trace);
  run.report.lambda = lambda_predictivity(data.split.node_count(), data.split.edge_count(),
                                          data.split.prior_edges.size());
  return run;
}

std::vector<ModelRun> compare_models(const Dataset& data, const TrainConfig& config) {
  std::vector<ModelRun> runs;
  for (std::string_view kind : {"gnn", "mlp", "logistic"}) runs.push_back(run_model(kind, data, config));
  return runs;
}

YearSplit remove_edges(const YearSplit& split, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw Error(ErrorKind::kInvalidArgument, "fraction outside [0, 1]");
  const std::size_t total = split.edge_count();
  std::vector<std::size_t> order(total);
  for (std::size_t i = 0; i < total; ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  shuffle(order, rng);
  const auto removed = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(total)));
  std::vector<char> drop(total, 0);
  for (std::size_t i = 0; i < removed; ++i) drop[order[i]] = 1;

  YearSplit out = split;
  out.prior_edges.clear();
  out.target_edges.clear();
  for (std::size_t i = 0; i < split.prior_edges.size(); ++i) {
    if (!drop[i]) out.prior_edges.push_back(split.prior_edges[i]);
  }
  const std::size_t np = split.prior_edges.size();
  for (std::size_t i = 0; i < split.target_edges.size(); ++i) {
    if (!drop[np + i]) out.target_edges.push_back(split.target_edges[i]);
  }
  return out;
}

AblationCurve ablate_edges(const Dataset& data, std::span<const double> fractions,
                           std::span<const std::uint64_t> seeds, const TrainConfig& config) {
  if (!std::is_sorted(fractions.begin(), fractions.end())) {
    throw Error(ErrorKind::kInvalidArgument, "ablation fractions must be ascending");
  }
  AblationCurve curve;
  // The MLP never reads edges, so one run per seed serves every fraction.
  std::map<std::uint64_t, double> mlp_f1;
  for (std::uint64_t seed : seeds) {
    TrainConfig c = config;
    c.seed = seed;
    mlp_f1[seed] = run_model("mlp", data, c).report.f1;
  }
  for (double f : fractions) {
    for (std::uint64_t seed : seeds) {
      TrainConfig c = config;
      c.seed = seed;
      Dataset thinned = with_split(data, remove_edges(data.split, f, seed));
      curve.points.push_back(AblationPoint{f, seed, run_model("gnn", thinned, c).report.f1, mlp_f1[seed]});
    }
  }
  std::stable_sort(curve.points.begin(), curve.points.end(), [](const auto& a, const auto& b) {
    return a.fraction != b.fraction ? a.fraction < b.fraction : a.seed < b.seed;
  });
  return curve;
}

std::string format_fixed(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

void write_eval_csv(std::ostream& os, std::span<const ModelRun> runs) {
  os << "model,seed,precision,recall,f1,lambda,params\n";
  for (const ModelRun& r : runs) {
    os << r.model << ',' << r.seed << ',' << format_fixed(r.report.precision) << ','
       << format_fixed(r.report.recall) << ',' << format_fixed(r.report.f1) << ','
       << format_fixed(r.report.lambda) << ',' << r.parameters << '\n';
  }
}

void write_ablation_csv(std::ostream& os, const AblationCurve& curve) {
  os << "fraction,seed,gnn_f1,mlp_f1\n";
  for (const AblationPoint& p : curve.points) {
    os << format_fixed(p.fraction) << ',' << p.seed << ',' << format_fixed(p.gnn_f1) << ','
       << format_fixed(p.mlp_f1) << '\n';
  }
}

}  // namespace citetrend
