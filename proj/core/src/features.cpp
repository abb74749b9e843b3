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

#include "citetrend/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "citetrend/error.hpp"

namespace citetrend {

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2) tokens.push_back(cur);
    cur.clear();
  };
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (u < 128 && std::isalnum(u)) {
      cur.push_back(static_cast<char>(std::tolower(u)));
    } else {
      flush();
    }
  }
  flush();
  return tokens;
}

const std::size_t* Vocabulary::find(const std::string& term) const {
  auto it = index.find(term);
  return it == index.end() ? nullptr : &it->second;
}

std::size_t Vocabulary::df(const std::string& term) const {
  const std::size_t* col = find(term);
  return col == nullptr ? 0 : document_frequency[*col];
}

double Vocabulary::idf(std::size_t column) const {
  const double n = static_cast<double>(corpus_size);
  const double d = static_cast<double>(document_frequency.at(column));
  return std::log((1.0 + n) / (1.0 + d)) + 1.0;
}

namespace {

// Keeps the `max_features` most frequent keys, ties broken lexicographically.
Vocabulary rank_terms(const std::map<std::string, std::size_t>& df, std::size_t corpus_size,
                      std::size_t max_features) {
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  if (ranked.size() > max_features) ranked.resize(max_features);
  Vocabulary v;
  v.corpus_size = corpus_size;
  v.max_features = max_features;
  for (auto& [term, count] : ranked) {
    v.index.emplace(term, v.terms.size());
    v.terms.push_back(term);
    v.document_frequency.push_back(count);
  }
  return v;
}

}  // namespace

Vocabulary fit_vocabulary(std::span<const std::string> docs, std::size_t max_features) {
  if (max_features < 1) throw Error(ErrorKind::kInvalidArgument, "max_features must be >= 1");
  std::map<std::string, std::size_t> df;
  for (const std::string& doc : docs) {
    auto tokens = tokenize(doc);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++df[t];
  }
  if (df.empty()) throw Error(ErrorKind::kEmptyCorpus, "no tokens in " + std::to_string(docs.size()) + " documents");
  return rank_terms(df, docs.size(), max_features);
}

SparseMatrix transform_tfidf(const Vocabulary& vocab, std::span<const std::string> docs) {
  SparseMatrix out(docs.size(), vocab.size());
  std::vector<std::pair<std::size_t, double>> row;
  for (const std::string& doc : docs) {
    std::map<std::size_t, double> counts;
    for (const auto& t : tokenize(doc)) {
      if (const std::size_t* col = vocab.find(t)) counts[*col] += 1.0;
    }
    row.assign(counts.begin(), counts.end());
    double norm = 0.0;
    for (auto& [col, w] : row) {
      w *= vocab.idf(col);
      norm += w * w;
    }
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (auto& [col, w] : row) w /= norm;
    }
    out.push_row(row);
  }
  return out;
}

std::string normalize_affiliation(std::string_view raw) {
  auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
  std::size_t b = 0, e = raw.size();
  while (b < e && is_space(raw[b])) ++b;
  while (e > b && is_space(raw[e - 1])) --e;
  std::string s(raw.substr(b, e - b));
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

Vocabulary fit_affiliations(std::span<const DocumentNode> nodes, std::size_t max_features) {
  if (max_features < 1) throw Error(ErrorKind::kInvalidArgument, "max_features must be >= 1");
  std::map<std::string, std::size_t> df;
  for (const DocumentNode& n : nodes) {
    std::set<std::string> unique;
    for (const auto& a : n.affiliations) {
      auto norm = normalize_affiliation(a);
      if (!norm.empty()) unique.insert(std::move(norm));
    }
    for (const auto& a : unique) ++df[a];
  }
  return rank_terms(df, nodes.size(), max_features);
}

SparseMatrix transform_affiliations(const Vocabulary& vocab, std::span<const DocumentNode> nodes) {
  SparseMatrix out(nodes.size(), vocab.size());
  std::vector<std::pair<std::size_t, double>> row;
  for (const DocumentNode& n : nodes) {
    std::set<std::size_t> cols;
    for (const auto& a : n.affiliations) {
      if (const std::size_t* col = vocab.find(normalize_affiliation(a))) cols.insert(*col);
    }
    row.clear();
    for (std::size_t c : cols) row.emplace_back(c, 1.0);
    out.push_row(row);
  }
  return out;
}

AffiliationEncoding encode_affiliations(std::span<const DocumentNode> nodes, std::size_t max_features) {
  AffiliationEncoding enc;
  enc.vocabulary = fit_affiliations(nodes, max_features);
  enc.matrix = transform_affiliations(enc.vocabulary, nodes);
  return enc;
}

Tensor encode_year(std::span<const DocumentNode> nodes, const YearSplit& split) {
  Tensor out(nodes.size(), 2);
  const int start = split.window_start();
  for (std::size_t r = 0; r < nodes.size(); ++r) {
    const int year = nodes[r].year;
    if (year < start || year > split.target_year) {
      throw Error(ErrorKind::kYearOutOfWindow, "node '" + nodes[r].id + "' year " + std::to_string(year));
    }
    out(r, 0) = static_cast<double>(year - start) / static_cast<double>(split.window_years);
    out(r, 1) = year == split.target_year ? 1.0 : 0.0;
  }
  return out;
}

RowLayout RowLayout::from_split(const YearSplit& split) {
  RowLayout layout;
  layout.nodes.reserve(split.node_count());
  layout.nodes.insert(layout.nodes.end(), split.prior_nodes.begin(), split.prior_nodes.end());
  layout.nodes.insert(layout.nodes.end(), split.target_nodes.begin(), split.target_nodes.end());
  layout.prior_count = split.prior_nodes.size();
  for (std::size_t r = 0; r < layout.nodes.size(); ++r) layout.row_of.emplace(layout.nodes[r], r);
  return layout;
}

FeatureSet FeatureSet::select_rows(std::span<const std::size_t> rows) const {
  FeatureSet out;
  out.text = text.select_rows(rows);
  out.affiliation = affiliation.select_rows(rows);
  out.year = Tensor(rows.size(), year.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const std::size_t r = rows[i];
    std::copy(year.row(r).begin(), year.row(r).end(), out.year.row(i).begin());
    out.layout.nodes.push_back(layout.nodes.at(r));
    out.layout.row_of.emplace(layout.nodes[r], i);
    if (!layout.is_target_row(r)) ++out.layout.prior_count;
  }
  out.text_vocabulary = text_vocabulary;
  out.affiliation_vocabulary = affiliation_vocabulary;
  return out;
}

FeatureSet build_features(const CitationGraph& graph, const YearSplit& split, const FeatureOptions& options) {
  FeatureSet fs;
  fs.layout = RowLayout::from_split(split);

  std::vector<DocumentNode> all;
  all.reserve(fs.layout.size());
  for (std::size_t v : fs.layout.nodes) all.push_back(graph.node(v));
  std::vector<std::string> texts;
  texts.reserve(all.size());
  for (const auto& n : all) texts.push_back(n.title_abstract);

  const std::size_t np = fs.layout.prior_count;
  if (np == 0) throw Error(ErrorKind::kEmptyCorpus, "split has no prior-window documents");
  std::span<const std::string> prior_texts(texts.data(), np);
  std::span<const DocumentNode> prior_nodes(all.data(), np);

  fs.text_vocabulary = fit_vocabulary(prior_texts, options.max_text_features);
  fs.text = transform_tfidf(fs.text_vocabulary, texts);
  fs.affiliation_vocabulary = fit_affiliations(prior_nodes, options.max_affiliation_features);
  fs.affiliation = transform_affiliations(fs.affiliation_vocabulary, all);
  fs.year = encode_year(all, split);
  return fs;
}

}  // namespace citetrend
