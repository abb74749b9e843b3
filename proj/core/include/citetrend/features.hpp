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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "citetrend/graph.hpp"
#include "citetrend/tensor.hpp"

namespace citetrend {

/// Lowercase alphanumeric runs of length >= 2; every other byte separates.
std::vector<std::string> tokenize(std::string_view text);

/// Term -> column map. Terms are ordered by descending document frequency,
/// ties broken lexicographically, so column indices are dense and stable.
struct Vocabulary {
  std::vector<std::string> terms;
  std::vector<std::size_t> document_frequency;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t corpus_size = 0;
  std::size_t max_features = 1000;

  std::size_t size() const noexcept { return terms.size(); }
  const std::size_t* find(const std::string& term) const;
  std::size_t df(const std::string& term) const;
  /// Smoothed inverse document frequency ln((1 + N) / (1 + df)) + 1.
  double idf(std::size_t column) const;
};

Vocabulary fit_vocabulary(std::span<const std::string> docs, std::size_t max_features = 1000);

/// Raw term count times idf, each nonempty row scaled to unit L2 norm.
/// Out-of-vocabulary tokens are ignored.
SparseMatrix transform_tfidf(const Vocabulary& vocab, std::span<const std::string> docs);

/// Case-folded, whitespace-trimmed affiliation strings.
std::string normalize_affiliation(std::string_view raw);

Vocabulary fit_affiliations(std::span<const DocumentNode> nodes, std::size_t max_features = 1000);
/// Multi-hot rows; unseen affiliations are ignored.
SparseMatrix transform_affiliations(const Vocabulary& vocab, std::span<const DocumentNode> nodes);

struct AffiliationEncoding {
  Vocabulary vocabulary;
  SparseMatrix matrix;
};
/// Fits an affiliation vocabulary on `nodes` and encodes the same nodes.
AffiliationEncoding encode_affiliations(std::span<const DocumentNode> nodes, std::size_t max_features);

/// Two columns per node: (year - window_start) / window_years, and a 1/0
/// flag for target-year membership.
Tensor encode_year(std::span<const DocumentNode> nodes, const YearSplit& split);

/// Row layout shared by features, neighborhoods and labels: the prior nodes
/// of a split in ascending graph order, then the target nodes.
struct RowLayout {
  std::vector<std::size_t> nodes;  // row -> graph index
  std::unordered_map<std::size_t, std::size_t> row_of;
  std::size_t prior_count = 0;

  static RowLayout from_split(const YearSplit& split);
  std::size_t size() const noexcept { return nodes.size(); }
  bool is_target_row(std::size_t row) const noexcept { return row >= prior_count; }
};

struct FeatureOptions {
  std::size_t max_text_features = 1000;
  std::size_t max_affiliation_features = 1000;

  bool operator==(const FeatureOptions&) const = default;
};

struct FeatureSet {
  SparseMatrix text;
  SparseMatrix affiliation;
  Tensor year;
  RowLayout layout;
  Vocabulary text_vocabulary;
  Vocabulary affiliation_vocabulary;

  std::size_t rows() const noexcept { return layout.size(); }
  /// Copies the selected rows into a new FeatureSet that shares vocabularies.
  FeatureSet select_rows(std::span<const std::size_t> rows) const;
};

/// Fits both vocabularies on the prior-window documents only and encodes
/// every row of the split layout.
FeatureSet build_features(const CitationGraph& graph, const YearSplit& split,
                          const FeatureOptions& options = {});

}  // namespace citetrend
