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

#include <benchmark/benchmark.h>

#include "citetrend/datasets.hpp"
#include "citetrend/experiments.hpp"
#include "citetrend/models.hpp"

namespace {

using namespace citetrend;

const Dataset& compact_dataset() {
  static const Dataset data = [] {
    SyntheticConfig cfg;
    for (const auto& [name, c] : synthetic_presets()) {
      if (name == "compact") cfg = c;
    }
    const GraphBundle b = generate_synthetic(cfg);
    return prepare_dataset(CitationGraph::build(b.nodes, b.edges), cfg.last_year, TrainConfig{});
  }();
  return data;
}

// One training step: train-mode forward, weighted BCE, backward.
void BM_ForwardBackward(benchmark::State& state, const char* kind) {
  const Dataset& d = compact_dataset();
  auto model = nn::make_model(kind, model_config(d, TrainConfig{}));
  std::vector<double> y;
  for (std::size_t r : d.train_rows) y.push_back(d.row_labels[r]);
  std::mt19937_64 rng(0);
  for (auto _ : state) {
    ad::Tape tape;
    ad::Var logits = model->forward(tape, d.features, d.neighborhoods, nn::Mode::kTrain, rng);
    tape.backward(ad::bce_with_logits(ad::gather_rows(logits, d.train_rows), y, 2.0));
  }
}
BENCHMARK_CAPTURE(BM_ForwardBackward, gnn, "gnn")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_ForwardBackward, mlp, "mlp")->Unit(benchmark::kMillisecond);

void BM_Predict(benchmark::State& state) {
  const Dataset& d = compact_dataset();
  nn::TrendModel model(model_config(d, TrainConfig{}));
  for (auto _ : state) benchmark::DoNotOptimize(model.predict(d.features, d.neighborhoods));
}
BENCHMARK(BM_Predict)->Unit(benchmark::kMillisecond);

// Scoring new papers against a cached prior stage versus a full forward.
void BM_PredictTargetsCached(benchmark::State& state) {
  const Dataset& d = compact_dataset();
  nn::TrendModel model(model_config(d, TrainConfig{}));
  const nn::PriorCache cache = model.prior_stage(d.features, d.neighborhoods);
  const nn::TargetBatch batch = nn::make_target_batch(d.features, d.split);
  for (auto _ : state) benchmark::DoNotOptimize(model.predict_targets(cache, batch));
}
BENCHMARK(BM_PredictTargetsCached)->Unit(benchmark::kMillisecond);

void BM_BuildFeatures(benchmark::State& state) {
  SyntheticConfig cfg;
  for (const auto& [name, c] : synthetic_presets()) {
    if (name == "compact") cfg = c;
  }
  const GraphBundle b = generate_synthetic(cfg);
  const CitationGraph g = CitationGraph::build(b.nodes, b.edges);
  const YearSplit split = split_by_year(g, cfg.last_year, 10);
  for (auto _ : state) benchmark::DoNotOptimize(build_features(g, split));
}
BENCHMARK(BM_BuildFeatures)->Unit(benchmark::kMillisecond);

}  // namespace
