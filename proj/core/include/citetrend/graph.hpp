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
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace citetrend {

/// A single publication and the raw attributes the feature pipeline reads.
struct DocumentNode {
  std::string id;
  int year = 0;
  std::int64_t citation_count = 0;
  std::string title_abstract;
  std::vector<std::string> affiliations;

  bool operator==(const DocumentNode&) const = default;
};

/// Directed citation, stored as node indices into CitationGraph::nodes().
struct Edge {
  std::size_t citing = 0;
  std::size_t cited = 0;

  auto operator<=>(const Edge&) const = default;
};

using IdEdge = std::pair<std::string, std::string>;

enum class IngestMode { kStrict, kLenient };

struct IngestOptions {
  IngestMode mode = IngestMode::kStrict;
  int min_year = 1800;
  int max_year = 2200;
};

struct IngestReport {
  std::size_t dropped_edges = 0;
};

/// Immutable, validated citation graph. Edges point citing -> cited and never
/// point forward in time.
class CitationGraph {
 public:
  CitationGraph() = default;

  /// Validates and builds a graph. In strict mode the first offending edge
  /// throws; in lenient mode offending edges are dropped and counted. Node
  /// level problems (duplicate ids, negative counts, years outside the
  /// configured range) always throw.
  static CitationGraph build(std::vector<DocumentNode> nodes, const std::vector<IdEdge>& edges,
                             const IngestOptions& options = {}, IngestReport* report = nullptr);

  const std::vector<DocumentNode>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  const DocumentNode& node(std::size_t index) const { return nodes_.at(index); }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  std::optional<std::size_t> index_of(const std::string& id) const;

 private:
  std::vector<DocumentNode> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Causal partition of a year window: prior nodes V_p and the target-year
/// nodes V_t. Node lists hold graph indices in ascending order.
struct YearSplit {
  int target_year = 0;
  int window_years = 0;
  std::vector<std::size_t> prior_nodes;
  std::vector<std::size_t> target_nodes;
  std::vector<Edge> prior_edges;   // both endpoints in prior_nodes
  std::vector<Edge> target_edges;  // target -> prior
  std::size_t dropped_edges = 0;   // target -> target citations

  int window_start() const noexcept { return target_year - window_years; }
  std::size_t node_count() const noexcept { return prior_nodes.size() + target_nodes.size(); }
  std::size_t edge_count() const noexcept { return prior_edges.size() + target_edges.size(); }
};

YearSplit split_by_year(const CitationGraph& graph, int target_year, int window_years);

/// Per-year top-percentile labels.
struct TrendLabels {
  double percentile = 0.0;
  std::map<std::size_t, int> labels;                   // node index -> {0, 1}
  std::map<int, std::int64_t> per_year_thresholds;     // year -> citation cutoff

  int label(std::size_t node) const { return labels.at(node); }
  std::size_t positive_count() const;
};

/// 1-based nearest rank ceil(p * n), clamped to [1, n].
std::size_t nearest_rank(double percentile, std::size_t n);

/// Labels a node 1 iff its citation count is strictly greater than the
/// nearest-rank percentile of the counts of nodes published the same year.
TrendLabels label_by_percentile(const CitationGraph& graph, const std::vector<std::size_t>& nodes,
                                double percentile);

}  // namespace citetrend
