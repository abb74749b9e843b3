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

#include "citetrend/graph.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "citetrend/error.hpp"

namespace citetrend {

CitationGraph CitationGraph::build(std::vector<DocumentNode> nodes, const std::vector<IdEdge>& edges,
                                   const IngestOptions& options, IngestReport* report) {
  CitationGraph g;
  g.index_.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const DocumentNode& n = nodes[i];
    if (n.citation_count < 0) {
      throw Error(ErrorKind::kNegativeCitationCount, "node '" + n.id + "'");
    }
    if (n.year < options.min_year || n.year > options.max_year) {
      throw Error(ErrorKind::kYearOutOfRange,
                  "node '" + n.id + "' year " + std::to_string(n.year));
    }
    if (!g.index_.emplace(n.id, i).second) {
      throw Error(ErrorKind::kDuplicateNode, "node '" + n.id + "'");
    }
  }
  g.nodes_ = std::move(nodes);

  const bool strict = options.mode == IngestMode::kStrict;
  std::size_t dropped = 0;
  std::set<Edge> seen;
  g.edges_.reserve(edges.size());
  for (const auto& [citing_id, cited_id] : edges) {
    auto reject = [&](ErrorKind kind, const std::string& what) {
      if (strict) throw Error(kind, "edge (" + citing_id + "," + cited_id + "): " + what);
      ++dropped;
    };
    auto citing = g.index_of(citing_id);
    auto cited = g.index_of(cited_id);
    if (!citing || !cited) {
      reject(ErrorKind::kUnknownEndpoint, "endpoint not in node set");
      continue;
    }
    if (*citing == *cited) {
      reject(ErrorKind::kSelfCitation, "self citation");
      continue;
    }
    if (g.nodes_[*cited].year > g.nodes_[*citing].year) {
      reject(ErrorKind::kAnticausalEdge, "cited node is newer than citing node");
      continue;
    }
    Edge e{*citing, *cited};
    if (!seen.insert(e).second) {
      reject(ErrorKind::kDuplicateEdge, "duplicate");
      continue;
    }
    g.edges_.push_back(e);
  }
  if (report != nullptr) report->dropped_edges = dropped;
  return g;
}

std::optional<std::size_t> CitationGraph::index_of(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

YearSplit split_by_year(const CitationGraph& graph, int target_year, int window_years) {
  if (window_years < 1) {
    throw Error(ErrorKind::kInvalidArgument, "window_years must be >= 1");
  }
  YearSplit split;
  split.target_year = target_year;
  split.window_years = window_years;
  const int start = target_year - window_years;

  // 0 = outside window, 1 = prior, 2 = target
  std::vector<unsigned char> role(graph.node_count(), 0);
  for (std::size_t i = 0; i < graph.node_count(); ++i) {
    const int year = graph.node(i).year;
    if (year == target_year) {
      role[i] = 2;
      split.target_nodes.push_back(i);
    } else if (year >= start && year < target_year) {
      role[i] = 1;
      split.prior_nodes.push_back(i);
    }
  }
  if (split.target_nodes.empty()) {
    throw Error(ErrorKind::kEmptyTargetYear, "no node published in " + std::to_string(target_year));
  }

  for (const Edge& e : graph.edges()) {
    const unsigned char from = role[e.citing];
    const unsigned char to = role[e.cited];
    if (from == 0 || to == 0) continue;
    if (from == 1 && to == 1) {
      split.prior_edges.push_back(e);
    } else if (from == 2 && to == 1) {
      split.target_edges.push_back(e);
    } else if (from == 2 && to == 2) {
      ++split.dropped_edges;
    } else {
      // prior -> target cannot pass graph validation
      throw Error(ErrorKind::kCausalityViolation, "prior node cites a target-year node");
    }
  }
  return split;
}

std::size_t TrendLabels::positive_count() const {
  std::size_t n = 0;
  for (const auto& [node, label] : labels) n += label == 1 ? 1 : 0;
  return n;
}

std::size_t nearest_rank(double percentile, std::size_t n) {
  // The epsilon absorbs representation error in products such as 0.7 * 10.
  const double raw = std::ceil(percentile * static_cast<double>(n) - 1e-9);
  const auto k = static_cast<std::size_t>(std::max(raw, 1.0));
  return std::min(k, n);
}

TrendLabels label_by_percentile(const CitationGraph& graph, const std::vector<std::size_t>& nodes,
                                double percentile) {
  if (!(percentile > 0.0 && percentile < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "percentile must lie in (0, 1)");
  }
  if (nodes.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "label_by_percentile needs a nonempty node set");
  }
  TrendLabels out;
  out.percentile = percentile;

  std::map<int, std::vector<std::int64_t>> counts_by_year;
  for (std::size_t v : nodes) {
    const DocumentNode& n = graph.node(v);
    counts_by_year[n.year].push_back(n.citation_count);
  }
  for (auto& [year, counts] : counts_by_year) {
    std::sort(counts.begin(), counts.end());
    out.per_year_thresholds[year] = counts[nearest_rank(percentile, counts.size()) - 1];
  }
  for (std::size_t v : nodes) {
    const DocumentNode& n = graph.node(v);
    out.labels[v] = n.citation_count > out.per_year_thresholds.at(n.year) ? 1 : 0;
  }
  return out;
}

}  // namespace citetrend
