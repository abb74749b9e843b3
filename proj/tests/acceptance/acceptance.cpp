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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "citetrend/datasets.hpp"
#include "citetrend/experiments.hpp"
#include "citetrend/models.hpp"
#include "citetrend/runtime.hpp"
#include "fixtures.hpp"
#include "gradcheck.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace citetrend;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SyntheticConfig preset(const std::string& name) {
  for (auto& [n, cfg] : synthetic_presets()) {
    if (n == name) return cfg;
  }
  throw std::runtime_error("unknown preset " + name);
}

int latest_year(const CitationGraph& g) {
  int y = g.node(0).year;
  for (const auto& n : g.nodes()) y = std::max(y, n.year);
  return y;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// ---- 1 ---------------------------------------------------------------------

Outcome gradient_fidelity() {
  const auto t0 = Clock::now();
  const CitationGraph g = testing::six_node_graph();
  const YearSplit split = split_by_year(g, 2013, 10);
  const FeatureSet features = build_features(g, split);
  const nn::Neighborhoods nb = nn::build_neighborhoods(split);
  nn::TrendModel model(nn::ModelConfig::for_features(features, 1));
  testing::jitter_parameters(model, 2);
  const std::vector<std::size_t> rows = {0, 1, 2, 3, 4, 5};
  const std::vector<double> y = {1, 0, 0, 1, 1, 0};
  const auto res = testing::check_model_gradients(model, features, nb, rows, y, 2.0, 200, 7);
  const double secs = seconds_since(t0);
  return {res.max_relative_error < 1e-4 && secs < 10.0,
          fmt("max relative error %.3g at %s over %zu coordinates, %.1f s", res.max_relative_error,
              res.worst.c_str(), res.checked, secs)};
}

// ---- 2 ---------------------------------------------------------------------

Outcome causality() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(2024);
  std::size_t graphs = 0, mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const CitationGraph g = testing::random_graph(rng, 20 + rng() % 30, 2000, 4 + static_cast<int>(rng() % 4));
    const YearSplit split = split_by_year(g, latest_year(g), 10);
    if (split.target_nodes.empty() || split.prior_nodes.empty()) continue;
    const FeatureSet fs = build_features(g, split);
    const nn::Neighborhoods nb = nn::build_neighborhoods(split);
    nn::TrendModel model(nn::ModelConfig::for_features(fs, trial));
    testing::jitter_parameters(model, trial);
    const auto base = model.activations(fs, nb);

    const std::size_t np = fs.layout.prior_count;
    FeatureSet perturbed = fs;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t k = fs.text.row_ptr[np]; k < fs.text.values.size(); ++k) perturbed.text.values[k] = noise(rng);
    for (std::size_t k = fs.affiliation.row_ptr[np]; k < fs.affiliation.values.size(); ++k) {
      perturbed.affiliation.values[k] = noise(rng);
    }
    for (std::size_t r = np; r < fs.layout.size(); ++r) perturbed.year(r, 0) = noise(rng);
    auto lists = nb.lists;
    for (std::size_t r = np; r < lists.size(); ++r) {
      std::set<std::size_t> cited;
      const std::size_t k = rng() % 4;
      for (std::size_t i = 0; i < k; ++i) cited.insert(rng() % np);
      lists[r] = {r};
      lists[r].insert(lists[r].end(), cited.begin(), cited.end());
    }
    const auto moved = model.activations(perturbed, nn::Neighborhoods::from_lists(lists));
    for (std::size_t r = 0; r < np; ++r) {
      for (std::size_t c = 0; c < base.layer1.cols(); ++c) mismatches += base.layer1(r, c) != moved.layer1(r, c);
      for (std::size_t c = 0; c < base.layer2.cols(); ++c) mismatches += base.layer2(r, c) != moved.layer2(r, c);
    }
    ++graphs;
  }
  const double secs = seconds_since(t0);
  return {graphs == 100 && mismatches == 0 && secs < 30.0,
          fmt("%zu graphs, %zu changed prior activations, %.1f s", graphs, mismatches, secs)};
}

// ---- 3, 5, 6, 11 share the ICML-scale graph --------------------------------

struct IcmlRuns {
  Dataset data;
  std::vector<double> gnn, mlp, logistic;
  std::vector<std::vector<double>> traces;  // seed 0: gnn, mlp, logistic
  double seconds = 0.0;
  std::size_t edges = 0;
};

constexpr int kSeeds = 5;

IcmlRuns icml_runs(const fs::path& workdir) {
  IcmlRuns out;
  const GraphBundle bundle = generate_synthetic(preset("icml-scale"));
  save_bundle(bundle, workdir / "icml-scale");
  const CitationGraph g = load_bundle(workdir / "icml-scale");
  out.edges = g.edges().size();
  const auto t0 = Clock::now();
  TrainConfig cfg;
  out.data = prepare_dataset(g, latest_year(g), cfg);
  for (int seed = 0; seed < kSeeds; ++seed) {
    cfg.seed = static_cast<std::uint64_t>(seed);
    for (const char* kind : {"gnn", "mlp", "logistic"}) {
      auto model = nn::make_model(kind, model_config(out.data, cfg));
      const TrainResult tr = train(*model, out.data, cfg);
      const Tensor logits = model->predict(out.data.features, out.data.neighborhoods);
      const double f1 = evaluate(logits, out.data.row_labels, out.data.target_rows).f1;
      const std::string k = kind;
      (k == "gnn" ? out.gnn : k == "mlp" ? out.mlp : out.logistic).push_back(f1);
      if (seed == 0) out.traces.push_back(tr.loss_trace);
      std::cerr << "  [icml] seed " << seed << ' ' << kind << " f1 " << format_fixed(f1) << '\n';
    }
  }
  out.seconds = seconds_since(t0);
  return out;
}

Outcome zero_edge(const IcmlRuns& icml, const AblationCurve& curve) {
  // Architectural half: mapped weights, self-only neighborhoods.
  double worst = 0.0;
  std::mt19937_64 rng(31);
  auto check = [&](const FeatureSet& fs, std::uint64_t seed) {
    const nn::ModelConfig cfg = nn::ModelConfig::for_features(fs, seed);
    nn::TrendModel gnn(cfg);
    testing::jitter_parameters(gnn, seed);
    nn::MlpBaseline mlp(cfg);
    nn::map_to_mlp(gnn, mlp);
    std::vector<std::vector<std::size_t>> lists(fs.layout.size());
    for (std::size_t r = 0; r < lists.size(); ++r) lists[r] = {r};
    const auto none = nn::Neighborhoods::from_lists(std::move(lists));
    const Tensor a = gnn.predict(fs, none), b = mlp.predict(fs, none);
    for (std::size_t r = 0; r < a.rows(); ++r) worst = std::max(worst, std::abs(a(r, 0) - b(r, 0)));
  };
  for (int trial = 0; trial < 10; ++trial) {
    const CitationGraph g = testing::random_graph(rng, 40, 2000, 5);
    const YearSplit split = split_by_year(g, 2004, 10);
    check(build_features(g, split), trial);
  }
  const YearSplit stripped = remove_edges(icml.data.split, 1.0, 0);
  const bool self_only = stripped.edge_count() == 0;
  check(icml.data.features, 99);

  // Trained half: fraction 1.0 across seeds.
  std::vector<double> gnn, mlp;
  for (const AblationPoint& p : curve.points) {
    if (p.fraction == 1.0) {
      gnn.push_back(p.gnn_f1);
      mlp.push_back(p.mlp_f1);
    }
  }
  const double gap = std::abs(mean(gnn) - mean(mlp));
  return {self_only && worst <= 1e-9 && gnn.size() == kSeeds && gap < 0.05,
          fmt("max |gnn - mlp| logit %.3g; at fraction 1.0 mean gnn f1 %.4f, mean mlp f1 %.4f, gap %.4f over %zu seeds",
              worst, mean(gnn), mean(mlp), gap, gnn.size())};
}

Outcome gnn_advantage(const IcmlRuns& r) {
  const double g = mean(r.gnn), m = mean(r.mlp), l = mean(r.logistic);
  const bool ok = g > m && g > l && g - m >= 0.05 && r.seconds < 600.0;
  return {ok, fmt("%zu nodes, %zu edges; mean f1 gnn %.4f, mlp %.4f, logistic %.4f; %.0f s",
                  r.data.features.layout.size(), r.edges, g, m, l, r.seconds)};
}

AblationCurve run_ablation(const IcmlRuns& icml) {
  // Fraction 0 is the unthinned graph, already trained above with the same
  // seeds; only the thinned fractions are retrained here.
  std::vector<double> fractions;
  for (int i = 1; i <= 10; ++i) fractions.push_back(i / 10.0);
  std::vector<std::uint64_t> seeds(kSeeds);
  std::iota(seeds.begin(), seeds.end(), 0);
  AblationCurve curve = ablate_edges(icml.data, fractions, seeds, TrainConfig{});
  for (int s = 0; s < kSeeds; ++s) {
    curve.points.insert(curve.points.begin() + s,
                        AblationPoint{0.0, static_cast<std::uint64_t>(s), icml.gnn[s], icml.mlp[s]});
  }
  return curve;
}

Outcome ablation_trend(const AblationCurve& curve, const fs::path& workdir) {
  std::map<double, std::vector<double>> by_fraction;
  for (const AblationPoint& p : curve.points) by_fraction[p.fraction].push_back(p.gnn_f1);
  std::vector<double> means;
  std::string shape;
  for (const auto& [f, v] : by_fraction) {
    means.push_back(mean(v));
    shape += fmt("%s%.1f:%.3f", shape.empty() ? "" : " ", f, means.back());
  }
  double worst = 0.0;
  for (std::size_t i = 1; i < means.size(); ++i) worst = std::max(worst, means[i] - means[i - 1]);
  std::ofstream csv(workdir / "ablation.csv");
  write_ablation_csv(csv, curve);
  return {means.size() == 11 && worst <= 0.03, fmt("largest step increase %.4f; %s", worst, shape.c_str())};
}

Outcome training_stability(const IcmlRuns& icml) {
  std::string detail;
  bool ok = true;
  auto judge = [&](const std::string& name, const std::vector<double>& trace) {
    bool finite = !trace.empty();
    for (double v : trace) finite = finite && std::isfinite(v);
    const double ratio = finite ? trace.back() / trace.front() : NAN;
    ok = ok && finite && ratio < 0.9;
    detail += fmt("%s%s %.3f", detail.empty() ? "" : ", ", name.c_str(), ratio);
  };
  const char* kinds[] = {"gnn", "mlp", "logistic"};
  for (int k = 0; k < 3; ++k) judge(std::string("icml-scale/") + kinds[k], icml.traces[k]);
  for (const char* name : {"compact", "no-signal"}) {
    const GraphBundle b = generate_synthetic(preset(name));
    const CitationGraph g = CitationGraph::build(b.nodes, b.edges);
    const TrainConfig cfg;
    const Dataset d = prepare_dataset(g, latest_year(g), cfg);
    for (const char* kind : kinds) {
      auto model = nn::make_model(kind, model_config(d, cfg));
      judge(std::string(name) + "/" + kind, train(*model, d, cfg).loss_trace);
    }
  }
  return {ok, "final/initial loss: " + detail};
}

// ---- 4 ---------------------------------------------------------------------

Outcome parity() {
  std::mt19937_64 rng(404);
  std::size_t equal = 0;
  std::string first_bad;
  for (int trial = 0; trial < 20; ++trial) {
    nn::ModelConfig cfg;
    cfg.text_width = 1 + rng() % 1000;
    cfg.affiliation_width = 1 + rng() % 1000;
    cfg.seed = trial;
    const nn::TrendModel gnn(cfg);
    const nn::MlpBaseline mlp(cfg);
    const std::size_t a = nn::count_parameters(gnn), b = nn::count_parameters(mlp);
    if (a == b) ++equal;
    else if (first_bad.empty()) first_bad = fmt(" first mismatch %zu vs %zu", a, b);
  }
  return {equal == 20, fmt("%zu/20 width configurations equal%s", equal, first_bad.c_str())};
}

// ---- 7 ---------------------------------------------------------------------

Outcome metric_oracle() {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> z(0.0, 3.0);
  std::size_t agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 200;
    std::vector<double> logits(n);
    std::vector<int> labels(n);
    std::vector<std::size_t> rows(n);
    const double pos_rate = static_cast<double>(rng() % 100) / 100.0;
    std::bernoulli_distribution pos(pos_rate);
    for (std::size_t i = 0; i < n; ++i) {
      logits[i] = rng() % 10 == 0 ? 0.0 : z(rng);
      labels[i] = pos(rng) ? 1 : 0;
      rows[i] = i;
    }
    const EvalReport r = evaluate(Tensor(n, 1, logits), labels, rows);
    const auto o = testing::brute_metrics(logits, labels);
    agree += r.confusion == Confusion{o.tp, o.fp, o.tn, o.fn} && r.precision == o.precision &&
             r.recall == o.recall && r.f1 == o.f1;
  }
  return {agree == 1000, fmt("%zu/1000 vectors exactly equal", agree)};
}

// ---- 8 ---------------------------------------------------------------------

Outcome lambda_formula() {
  const double sym = lambda_predictivity(100, 100, 50);
  const double icml = lambda_predictivity(2669, 4591, 3000);
  const double icml_hand = (1.0 / 2669.0) * (3000.0 / 1591.0) * 100.0;
  const bool inf = std::isinf(lambda_predictivity(10, 7, 7));
  bool examples = std::abs(sym - 1.0) < 1e-12 && std::abs(icml - icml_hand) < 1e-12 && inf &&
                  std::abs(icml - 0.0707) < 1e-4;

  std::mt19937_64 rng(8);
  std::size_t invariant = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const CitationGraph g = testing::random_graph(rng, 30 + rng() % 50, 2000, 6);
    std::vector<std::size_t> perm(g.node_count());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<DocumentNode> nodes = g.nodes();
    std::vector<std::string> fresh(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) fresh[i] = "x" + std::to_string(perm[i]);
    std::vector<IdEdge> edges;
    for (const Edge& e : g.edges()) edges.emplace_back(fresh[e.citing], fresh[e.cited]);
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].id = fresh[i];
    std::shuffle(nodes.begin(), nodes.end(), rng);
    std::shuffle(edges.begin(), edges.end(), rng);
    const CitationGraph h = CitationGraph::build(nodes, edges);
    const double a = lambda_predictivity(split_by_year(g, 2005, 10), g);
    const double b = lambda_predictivity(split_by_year(h, 2005, 10), h);
    invariant += a == b || (std::isinf(a) && std::isinf(b));
  }
  return {examples && invariant == 20,
          fmt("symmetric %.12f, icml-scale %.12f (hand %.12f), empty E_t %s; %zu/20 relabelings invariant", sym,
              icml, icml_hand, inf ? "inf" : "finite", invariant)};
}

// ---- 9 ---------------------------------------------------------------------

Outcome labeling_oracle() {
  std::mt19937_64 rng(99);
  std::size_t agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 80;
    const int years = 1 + static_cast<int>(rng() % 4);
    const double p = static_cast<double>(1 + rng() % 99) / 100.0;
    const std::int64_t spread = 1 + static_cast<std::int64_t>(rng() % 50);
    std::vector<DocumentNode> nodes;
    std::vector<int> ys;
    std::vector<std::int64_t> counts;
    for (std::size_t i = 0; i < n; ++i) {
      ys.push_back(2000 + static_cast<int>(rng() % static_cast<std::uint64_t>(years)));
      counts.push_back(static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(spread)));
      nodes.push_back(testing::doc("n" + std::to_string(i), ys.back(), counts.back()));
    }
    const CitationGraph g = CitationGraph::build(nodes, {});
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), 0);
    const TrendLabels labels = label_by_percentile(g, all, p);
    const auto thresholds = testing::brute_thresholds(ys, counts, p);
    bool same = labels.per_year_thresholds == thresholds;
    for (std::size_t i = 0; i < n && same; ++i) {
      same = labels.label(i) == (counts[i] > thresholds.at(ys[i]) ? 1 : 0);
    }
    agree += same;
  }
  return {agree == 1000, fmt("%zu/1000 count vectors exactly equal", agree)};
}

// ---- 10 --------------------------------------------------------------------

struct Shell {
  fs::path dir;
  int counter = 0;
  // Runs the CLI and returns stdout, or the empty string on failure.
  std::string run(const std::string& args, bool& ok) {
    const fs::path out = dir / ("stdout" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string("\"") + CITETREND_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2>/dev/null";
    const int status = std::system(cmd.c_str());
    ok = ok && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    std::ifstream in(out, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome cli_determinism(const fs::path& workdir) {
  Shell sh{workdir / "cli"};
  fs::create_directories(sh.dir);
  bool ok = true;
  std::vector<std::string> differing;
  const std::string d = sh.dir.string();
  const std::string common = " --bundle " + d + "/bundle --epochs 20";

  std::string bundle_bytes[2];
  for (int i = 0; i < 2; ++i) {
    const fs::path out = sh.dir / ("gen" + std::to_string(i));
    sh.run("generate --preset compact --seed 5 --out " + out.string(), ok);
    for (const char* f : {"manifest.json", "nodes.jsonl", "edges.csv"}) bundle_bytes[i] += slurp(out / f);
  }
  if (bundle_bytes[0] != bundle_bytes[1]) differing.push_back("generate");
  sh.run("generate --preset compact --seed 5 --out " + d + "/bundle", ok);

  auto twice = [&](const std::string& name, const std::string& args, const std::string& csv_file = "") {
    std::string outs[2];
    for (int i = 0; i < 2; ++i) {
      std::string a = args;
      if (!csv_file.empty()) a += " --out " + d + "/" + std::to_string(i) + csv_file;
      outs[i] = sh.run(a, ok);
      if (!csv_file.empty()) outs[i] += slurp(d + "/" + std::to_string(i) + csv_file);
    }
    if (outs[0].empty() || outs[0] != outs[1]) differing.push_back(name);
  };
  twice("train", "train --model gnn --seed 3 --out " + d + "/model.ckpt" + common);
  twice("evaluate", "evaluate --ckpt " + d + "/model.ckpt --bundle " + d + "/bundle");
  twice("ablate", "ablate --fractions 0,0.5,1 --seeds 2 --seed 1" + common, "ablate.csv");
  twice("lambda", "lambda --bundle " + d + "/bundle");
  twice("compare", "compare --seed 2" + common, "compare.csv");

  std::string detail = "generate, train, evaluate, ablate, lambda, compare run twice";
  if (!ok) detail += "; a command exited nonzero";
  for (const auto& n : differing) detail += "; " + n + " differs";
  return {ok && differing.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  tune_allocator();
  CLI::App app{"citetrend acceptance suite"};
  std::string workdir = (fs::temp_directory_path() / "citetrend_acceptance").string();
  app.add_option("--workdir", workdir, "Scratch directory for bundles and CLI outputs");
  std::vector<int> only;
  app.add_option("--only", only, "Run just these criteria (3, 6 and 11 also need 5)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);
  fs::remove_all(workdir);
  fs::create_directories(workdir);

  std::map<int, std::pair<std::string, Outcome>> results;
  auto record = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) return;
    std::cerr << "running " << id << ' ' << name << '\n';
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    results[id] = {name, o};
    std::cout << (o.pass ? "PASS " : "FAIL ") << id << " " << name << ": " << o.detail << std::endl;
  };

  record(1, "gradient fidelity", gradient_fidelity);
  record(2, "causality", causality);
  record(4, "parameter parity", parity);
  record(7, "metric oracle", metric_oracle);
  record(8, "lambda formula", lambda_formula);
  record(9, "labeling oracle", labeling_oracle);
  record(10, "CLI determinism", [&] { return cli_determinism(workdir); });

  IcmlRuns icml;
  bool have_icml = false;
  record(5, "GNN advantage", [&] {
    icml = icml_runs(workdir);
    have_icml = true;
    return gnn_advantage(icml);
  });
  AblationCurve curve;
  bool have_curve = false;
  record(6, "ablation trend", [&] {
    if (!have_icml) return Outcome{false, "ICML-scale runs unavailable"};
    curve = run_ablation(icml);
    have_curve = true;
    return ablation_trend(curve, workdir);
  });
  record(3, "zero-edge equivalence", [&] {
    if (!have_curve) return Outcome{false, "ablation curve unavailable"};
    return zero_edge(icml, curve);
  });
  record(11, "training stability", [&] {
    if (!have_icml) return Outcome{false, "ICML-scale runs unavailable"};
    return training_stability(icml);
  });

  std::cout << "\nsummary\n";
  int failed = 0;
  for (const auto& [id, r] : results) {
    std::cout << (r.second.pass ? "PASS " : "FAIL ") << id << " " << r.first << '\n';
    failed += !r.second.pass;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all criteria passed")) << '\n';
  return failed ? 1 : 0;
}
