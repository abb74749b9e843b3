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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "citetrend/graph.hpp"

namespace citetrend::testing {

inline DocumentNode doc(std::string id, int year, std::int64_t count = 0, std::string text = "paper text",
                        std::vector<std::string> affiliations = {"Lab"}) {
  return DocumentNode{std::move(id), year, count, std::move(text), std::move(affiliations)};
}

// Six papers over 2010-2013; n4 and n5 are the 2013 targets.
//   n1 -> n0, n2 -> n0, n2 -> n1, n3 -> n2, n4 -> n1, n4 -> n3, n5 -> n0
inline CitationGraph six_node_graph() {
  std::vector<DocumentNode> nodes = {
      doc("n0", 2010, 9, "graph attention networks for citation data", {"MIT"}),
      doc("n1", 2011, 4, "attention models over citation graphs", {"CMU", "MIT"}),
      doc("n2", 2011, 1, "convex optimization with sparse priors", {"ETH"}),
      doc("n3", 2012, 7, "sparse graph neural message passing", {"CMU"}),
      doc("n4", 2013, 3, "attention for trending paper prediction", {"MIT"}),
      doc("n5", 2013, 0, "optimization of convex sparse losses", {"Oxford"}),
  };
  std::vector<IdEdge> edges = {{"n1", "n0"}, {"n2", "n0"}, {"n2", "n1"}, {"n3", "n2"},
                               {"n4", "n1"}, {"n4", "n3"}, {"n5", "n0"}};
  return CitationGraph::build(std::move(nodes), edges);
}

inline std::string random_words(std::mt19937_64& rng, std::size_t count) {
  static const char* kWords[] = {"graph", "neural", "attention", "sparse", "convex", "kernel", "bayes",
                                 "trend", "deep", "network", "model", "learning", "matrix", "tensor"};
  std::string out;
  for (std::size_t i = 0; i < count; ++i) {
    if (!out.empty()) out += ' ';
    out += kWords[rng() % (sizeof kWords / sizeof kWords[0])];
  }
  return out;
}

// Random causal graph: `n` papers spread over [first_year, first_year +
// years), each citing up to `max_out` papers of earlier or equal year.
inline CitationGraph random_graph(std::mt19937_64& rng, std::size_t n, int first_year, int years,
                                  std::size_t max_out = 3) {
  std::vector<DocumentNode> nodes;
  for (std::size_t i = 0; i < n; ++i) {
    const int year = first_year + static_cast<int>((i * static_cast<std::size_t>(years)) / n);
    nodes.push_back(doc("p" + std::to_string(i), year, static_cast<std::int64_t>(rng() % 20),
                        random_words(rng, 6), {"inst" + std::to_string(rng() % 5)}));
  }
  std::vector<IdEdge> edges;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t k = rng() % (max_out + 1);
    std::vector<std::size_t> picked;
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t j = rng() % i;
      if (std::find(picked.begin(), picked.end(), j) != picked.end()) continue;
      picked.push_back(j);
      edges.emplace_back(nodes[i].id, nodes[j].id);
    }
  }
  return CitationGraph::build(std::move(nodes), edges);
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("citetrend_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace citetrend::testing
