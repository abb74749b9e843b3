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
#include <filesystem>
#include <string>
#include <vector>

#include "citetrend/graph.hpp"

namespace citetrend {

inline constexpr int kBundleFormatVersion = 1;

/// On-disk graph: `manifest.json`, `nodes.jsonl` (one JSON object per node)
/// and `edges.csv` (one `citing_id,cited_id` pair per line, no header).
struct GraphBundle {
  std::string corpus;
  std::vector<DocumentNode> nodes;
  std::vector<IdEdge> edges;

  bool operator==(const GraphBundle&) const = default;
};

void save_bundle(const GraphBundle& bundle, const std::filesystem::path& dir);
/// Parses and checks the manifest. ParseError messages carry `file:line`.
GraphBundle read_bundle(const std::filesystem::path& dir);
/// read_bundle followed by CitationGraph::build.
CitationGraph load_bundle(const std::filesystem::path& dir, const IngestOptions& options = {});

/// Knobs of the planted-signal citation graph generator.
///
/// Years are spread evenly over [first_year, last_year]. Every node outside
/// the first year cites 1 + Poisson(out_degree - 1) earlier-year papers by
/// preferential attachment on in-degree. A latent fraction of papers is
/// "trending": with probability trend_signal_strength such a paper writes
/// about the hot topic and cites only other trending papers, and its future
/// citations are boosted. At strength 0 the latent flag has no effect, so
/// labels carry no signal about text or edges.
struct SyntheticConfig {
  std::string corpus = "synthetic";
  std::size_t n_nodes = 2669;
  int first_year = 2005;
  int last_year = 2015;
  double out_degree = 1.9;
  double trend_signal_strength = 0.8;
  double trending_fraction = 0.1;
  std::size_t topics = 10;
  std::size_t words_per_topic = 50;
  std::size_t background_words = 400;
  std::size_t words_per_document = 40;
  double topic_purity = 0.5;
  std::size_t affiliations = 60;
  double base_future_citations = 2.0;
  double trend_future_citations = 12.0;
  std::uint64_t seed = 1;

  void validate() const;
  std::string to_json() const;
  static SyntheticConfig from_json(const std::string& text);
  bool operator==(const SyntheticConfig&) const = default;
};

GraphBundle generate_synthetic(const SyntheticConfig& cfg);

/// Named generator presets shipped with the project.
std::vector<std::pair<std::string, SyntheticConfig>> synthetic_presets();

}  // namespace citetrend
