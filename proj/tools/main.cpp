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

// citetrend command-line interface.
//
// Exit codes: 0 success, 1 data or model error, 2 usage error.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "citetrend/checkpoint.hpp"
#include "citetrend/datasets.hpp"
#include "citetrend/error.hpp"
#include "citetrend/experiments.hpp"
#include "citetrend/runtime.hpp"

namespace {

using namespace citetrend;

constexpr const char* kDataDirEnv = "CITETREND_DATA_DIR";

struct PipelineArgs {
  std::string bundle;
  std::optional<int> target_year;
  int window = 10;
  double percentile = 0.9;
  std::size_t epochs = 150;
  std::uint64_t seed = 0;
  bool lenient = false;
  std::size_t max_text = 1000;
  std::size_t max_affiliation = 1000;
  std::string out;

  TrainConfig train_config() const {
    TrainConfig c;
    c.window_years = window;
    c.percentile = percentile;
    c.epochs = epochs;
    c.seed = seed;
    c.features.max_text_features = max_text;
    c.features.max_affiliation_features = max_affiliation;
    return c;
  }
};

void add_bundle(CLI::App* cmd, PipelineArgs& a) {
  if (const char* env = std::getenv(kDataDirEnv)) a.bundle = env;
  auto* opt = cmd->add_option("--bundle", a.bundle, std::string("Graph bundle directory (default $") + kDataDirEnv + ")");
  if (a.bundle.empty()) opt->required();
  cmd->add_flag("--lenient", a.lenient, "Drop invalid edges instead of failing");
}

void add_split(CLI::App* cmd, PipelineArgs& a) {
  cmd->add_option("--target-year", a.target_year, "Prediction year (default: latest year in the bundle)");
  cmd->add_option("--window", a.window, "Prior window in years")->check(CLI::PositiveNumber);
}

void add_training(CLI::App* cmd, PipelineArgs& a) {
  cmd->add_option("--percentile", a.percentile, "Per-year trending percentile")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--epochs", a.epochs, "Adam steps");
  cmd->add_option("--max-text-features", a.max_text, "tf-idf vocabulary cap");
  cmd->add_option("--max-affiliation-features", a.max_affiliation, "Affiliation vocabulary cap");
}

CitationGraph load(const PipelineArgs& a) {
  IngestOptions opts;
  opts.mode = a.lenient ? IngestMode::kLenient : IngestMode::kStrict;
  return load_bundle(a.bundle, opts);
}

int resolve_target_year(const PipelineArgs& a, const CitationGraph& g) {
  if (a.target_year) return *a.target_year;
  if (g.nodes().empty()) throw Error(ErrorKind::kEmptyCorpus, "bundle has no nodes");
  int latest = g.nodes().front().year;
  for (const auto& n : g.nodes()) latest = std::max(latest, n.year);
  return latest;
}

// Writes to --out when given, stdout otherwise.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os || !(os << text)) throw Error(ErrorKind::kIoError, "cannot write " + path);
}

std::vector<double> parse_fractions(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const double f = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(f);
    } catch (const std::logic_error&) {
      throw CLI::ValidationError("--fractions", "not a number: '" + item + "'");
    }
  }
  if (out.empty()) throw CLI::ValidationError("--fractions", "empty list");
  return out;
}

int cmd_generate(const std::string& config_path, const std::string& preset, std::optional<std::uint64_t> seed,
                 const std::string& out) {
  SyntheticConfig cfg;
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) throw Error(ErrorKind::kIoError, "cannot read " + config_path);
    std::stringstream ss;
    ss << is.rdbuf();
    cfg = SyntheticConfig::from_json(ss.str());
  } else {
    bool found = false;
    for (const auto& [name, c] : synthetic_presets()) {
      if (name == preset) {
        cfg = c;
        found = true;
      }
    }
    if (!found) throw Error(ErrorKind::kInvalidArgument, "unknown preset '" + preset + "'");
  }
  if (seed) cfg.seed = *seed;
  const GraphBundle bundle = generate_synthetic(cfg);
  save_bundle(bundle, out);
  std::cout << "wrote " << bundle.nodes.size() << " nodes, " << bundle.edges.size() << " edges to " << out << '\n';
  return 0;
}

int cmd_train(const PipelineArgs& a, const std::string& model) {
  const CitationGraph g = load(a);
  const int year = resolve_target_year(a, g);
  const TrainConfig cfg = a.train_config();
  const Dataset data = prepare_dataset(g, year, cfg);
  auto net = nn::make_model(model, model_config(data, cfg));
  train(*net, data, cfg);

  ModelRun run;
  run.model = model;
  run.seed = cfg.seed;
  run.parameters = nn::count_parameters(*net);
  run.report = evaluate(net->predict(data.features, data.neighborhoods), data.row_labels, data.target_rows);
  run.report.lambda = lambda_predictivity(data.split, g);
  std::ostringstream csv;
  write_eval_csv(csv, std::span<const ModelRun>(&run, 1));
  std::cout << csv.str();
  if (!a.out.empty()) save_checkpoint(capture(*net, cfg, year), a.out);
  return 0;
}

int cmd_evaluate(const PipelineArgs& a, const std::string& ckpt_path) {
  const Checkpoint ckpt = load_checkpoint(ckpt_path);
  const CitationGraph g = load(a);
  const int year = a.target_year.value_or(ckpt.target_year);
  const Dataset data = prepare_dataset(g, year, ckpt.train);
  auto net = instantiate(ckpt);

  Tensor logits;
  std::vector<int> labels;
  std::vector<std::size_t> rows;
  if (auto* gnn = dynamic_cast<nn::TrendModel*>(net.get())) {
    // Score target papers against the cached prior stage only.
    const nn::PriorCache cache = gnn->prior_stage(data.features, data.neighborhoods);
    const nn::TargetBatch batch = nn::make_target_batch(data.features, data.split);
    logits = gnn->predict_targets(cache, batch).logits;
    for (std::size_t i = 0; i < data.target_rows.size(); ++i) {
      labels.push_back(data.row_labels[data.target_rows[i]]);
      rows.push_back(i);
    }
  } else {
    logits = net->predict(data.features, data.neighborhoods);
    labels = data.row_labels;
    rows = data.target_rows;
  }

  ModelRun run;
  run.model = ckpt.kind;
  run.seed = ckpt.train.seed;
  run.parameters = nn::count_parameters(*net);
  run.report = evaluate(logits, labels, rows);
  run.report.lambda = lambda_predictivity(data.split, g);
  std::ostringstream csv;
  write_eval_csv(csv, std::span<const ModelRun>(&run, 1));
  emit(a.out, csv.str());
  return 0;
}

int cmd_ablate(const PipelineArgs& a, const std::string& fractions_text, std::size_t seed_count) {
  const std::vector<double> fractions = parse_fractions(fractions_text);
  const CitationGraph g = load(a);
  const TrainConfig cfg = a.train_config();
  const Dataset data = prepare_dataset(g, resolve_target_year(a, g), cfg);
  std::vector<std::uint64_t> seeds;
  for (std::size_t i = 0; i < seed_count; ++i) seeds.push_back(a.seed + i);
  const AblationCurve curve = ablate_edges(data, fractions, seeds, cfg);
  std::ostringstream csv;
  write_ablation_csv(csv, curve);
  emit(a.out, csv.str());
  return 0;
}

int cmd_lambda(const PipelineArgs& a) {
  const CitationGraph g = load(a);
  const YearSplit split = split_by_year(g, resolve_target_year(a, g), a.window);
  std::cout << format_fixed(lambda_predictivity(split, g)) << '\n';
  return 0;
}

int cmd_compare(const PipelineArgs& a) {
  const CitationGraph g = load(a);
  const TrainConfig cfg = a.train_config();
  const Dataset data = prepare_dataset(g, resolve_target_year(a, g), cfg);
  const std::vector<ModelRun> runs = compare_models(data, cfg);
  std::ostringstream csv;
  write_eval_csv(csv, runs);
  emit(a.out, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  citetrend::tune_allocator();
  CLI::App app{"Citation trend prediction with causality-masked graph attention"};
  app.require_subcommand(1);

  std::string gen_config, gen_preset = "icml-scale", gen_out;
  std::optional<std::uint64_t> gen_seed;
  auto* generate = app.add_subcommand("generate", "Write a synthetic graph bundle");
  auto* gen_src = generate->add_option("--config", gen_config, "SyntheticConfig JSON file");
  generate->add_option("--preset", gen_preset, "Built-in preset (icml-scale, compact, no-signal)")->excludes(gen_src);
  generate->add_option("--seed", gen_seed, "Override the generator seed");
  generate->add_option("--out", gen_out, "Output bundle directory")->required();

  PipelineArgs train_args;
  std::string model = "gnn";
  auto* train_cmd = app.add_subcommand("train", "Train one model and print its EvalReport CSV");
  add_bundle(train_cmd, train_args);
  add_split(train_cmd, train_args);
  add_training(train_cmd, train_args);
  train_cmd->add_option("--model", model, "Model kind")->check(CLI::IsMember({"gnn", "mlp", "logistic"}));
  train_cmd->add_option("--seed", train_args.seed, "Seed for init, dropout and everything else");
  train_cmd->add_option("--out", train_args.out, "Checkpoint path");

  PipelineArgs eval_args;
  std::string ckpt;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score target papers with a trained checkpoint");
  add_bundle(eval_cmd, eval_args);
  eval_cmd->add_option("--ckpt", ckpt, "Checkpoint written by train")->required();
  eval_cmd->add_option("--target-year", eval_args.target_year, "Override the checkpoint's target year");
  eval_cmd->add_option("--out", eval_args.out, "CSV path (default stdout)");

  PipelineArgs ablate_args;
  std::string fractions = "0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
  std::size_t seed_count = 5;
  auto* ablate = app.add_subcommand("ablate", "Edge-removal ablation curve");
  add_bundle(ablate, ablate_args);
  add_split(ablate, ablate_args);
  add_training(ablate, ablate_args);
  ablate->add_option("--fractions", fractions, "Ascending comma-separated removal fractions");
  ablate->add_option("--seeds", seed_count, "Number of seeds (seed, seed+1, ...)")->check(CLI::PositiveNumber);
  ablate->add_option("--seed", ablate_args.seed, "First seed");
  ablate->add_option("--out", ablate_args.out, "CSV path (default stdout)");

  PipelineArgs lambda_args;
  auto* lambda = app.add_subcommand("lambda", "Print the predictivity parameter of a split");
  add_bundle(lambda, lambda_args);
  add_split(lambda, lambda_args);

  PipelineArgs compare_args;
  auto* compare = app.add_subcommand("compare", "Train gnn, mlp and logistic under one config");
  add_bundle(compare, compare_args);
  add_split(compare, compare_args);
  add_training(compare, compare_args);
  compare->add_option("--seed", compare_args.seed, "Shared seed");
  compare->add_option("--out", compare_args.out, "CSV path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*generate) return cmd_generate(gen_config, gen_preset, gen_seed, gen_out);
    if (*train_cmd) return cmd_train(train_args, model);
    if (*eval_cmd) return cmd_evaluate(eval_args, ckpt);
    if (*ablate) return cmd_ablate(ablate_args, fractions, seed_count);
    if (*lambda) return cmd_lambda(lambda_args);
    if (*compare) return cmd_compare(compare_args);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const citetrend::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
