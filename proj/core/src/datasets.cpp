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

#include "citetrend/datasets.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "citetrend/error.hpp"
#include "citetrend/random.hpp"
#include "json.hpp"

namespace citetrend {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kNodes = "nodes.jsonl";
constexpr const char* kEdges = "edges.csv";

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os) throw Error(ErrorKind::kIoError, "cannot write " + p.string());
  return os;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) throw Error(ErrorKind::kIoError, "cannot read " + p.string());
  return is;
}

void check_id(const std::string& id) {
  if (id.empty() || id.find_first_of(",\r\n") != std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument, "node id '" + id + "' is empty or contains ',' or a line break");
  }
}

[[noreturn]] void parse_error(const char* file, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::kParseError, std::string(file) + ":" + std::to_string(line) + ": " + what);
}

DocumentNode node_from_json(const json& j, std::size_t line) {
  DocumentNode n;
  try {
    n.id = j.at("id").get<std::string>();
    n.year = j.at("year").get<int>();
    n.citation_count = j.at("citation_count").get<std::int64_t>();
    n.title_abstract = j.at("title_abstract").get<std::string>();
    n.affiliations = j.at("affiliations").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    parse_error(kNodes, line, e.what());
  }
  if (!j.at("year").is_number_integer() || !j.at("citation_count").is_number_integer()) {
    parse_error(kNodes, line, "year and citation_count must be integers");
  }
  return n;
}

}  // namespace

void save_bundle(const GraphBundle& bundle, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorKind::kIoError, "cannot create " + dir.string() + ": " + ec.message());
  for (const auto& n : bundle.nodes) check_id(n.id);
  for (const auto& [a, b] : bundle.edges) {
    check_id(a);
    check_id(b);
  }

  json manifest = {{"format_version", kBundleFormatVersion},
                   {"corpus", bundle.corpus},
                   {"node_count", bundle.nodes.size()},
                   {"edge_count", bundle.edges.size()}};
  open_out(dir / kManifest) << manifest.dump(2) << '\n';

  auto nodes = open_out(dir / kNodes);
  for (const auto& n : bundle.nodes) {
    json j = {{"id", n.id},
              {"year", n.year},
              {"citation_count", n.citation_count},
              {"title_abstract", n.title_abstract},
              {"affiliations", n.affiliations}};
    nodes << j.dump() << '\n';
  }
  auto edges = open_out(dir / kEdges);
  for (const auto& [a, b] : bundle.edges) edges << a << ',' << b << '\n';
  if (!nodes || !edges) throw Error(ErrorKind::kIoError, "write failed in " + dir.string());
}

GraphBundle read_bundle(const fs::path& dir) {
  GraphBundle bundle;
  json manifest;
  {
    auto is = open_in(dir / kManifest);
    try {
      is >> manifest;
    } catch (const json::exception& e) {
      parse_error(kManifest, 1, e.what());
    }
  }
  std::size_t want_nodes = 0, want_edges = 0;
  try {
    const int version = manifest.at("format_version").get<int>();
    if (version != kBundleFormatVersion) {
      throw Error(ErrorKind::kManifestMismatch, "unsupported format_version " + std::to_string(version));
    }
    bundle.corpus = manifest.at("corpus").get<std::string>();
    want_nodes = manifest.at("node_count").get<std::size_t>();
    want_edges = manifest.at("edge_count").get<std::size_t>();
  } catch (const json::exception& e) {
    parse_error(kManifest, 1, e.what());
  }

  {
    auto is = open_in(dir / kNodes);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      json j;
      try {
        j = json::parse(line);
      } catch (const json::exception& e) {
        parse_error(kNodes, lineno, e.what());
      }
      if (!j.is_object()) parse_error(kNodes, lineno, "expected a JSON object");
      bundle.nodes.push_back(node_from_json(j, lineno));
    }
  }
  {
    auto is = open_in(dir / kEdges);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
        parse_error(kEdges, lineno, "expected exactly two comma-separated fields in '" + line + "'");
      }
      std::string a = line.substr(0, comma), b = line.substr(comma + 1);
      if (a.empty() || b.empty()) parse_error(kEdges, lineno, "empty endpoint in '" + line + "'");
      bundle.edges.emplace_back(std::move(a), std::move(b));
    }
  }
  if (bundle.nodes.size() != want_nodes || bundle.edges.size() != want_edges) {
    throw Error(ErrorKind::kManifestMismatch,
                "manifest lists " + std::to_string(want_nodes) + " nodes / " + std::to_string(want_edges) +
                    " edges, files hold " + std::to_string(bundle.nodes.size()) + " / " +
                    std::to_string(bundle.edges.size()));
  }
  return bundle;
}

CitationGraph load_bundle(const fs::path& dir, const IngestOptions& options) {
  GraphBundle b = read_bundle(dir);
  return CitationGraph::build(std::move(b.nodes), b.edges, options);
}

// ---- synthetic generator ----------------------------------------------------

void SyntheticConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorKind::kInvalidArgument, "synthetic config: " + what); };
  if (last_year < first_year) fail("last_year < first_year");
  const auto span = static_cast<std::size_t>(last_year - first_year + 1);
  if (n_nodes < span) fail("n_nodes must be >= number of years");
  if (!(out_degree >= 1.0)) fail("out_degree must be >= 1");
  if (!(trend_signal_strength >= 0.0 && trend_signal_strength <= 1.0)) fail("trend_signal_strength outside [0, 1]");
  if (!(trending_fraction > 0.0 && trending_fraction < 1.0)) fail("trending_fraction outside (0, 1)");
  if (topics < 2 || words_per_topic < 1 || background_words < 1 || words_per_document < 1) fail("vocabulary sizes");
  if (!(topic_purity >= 0.0 && topic_purity <= 1.0)) fail("topic_purity outside [0, 1]");
  if (affiliations < 1) fail("affiliations must be >= 1");
  if (base_future_citations < 0.0 || trend_future_citations < 0.0) fail("future citation rates must be >= 0");
}

std::string SyntheticConfig::to_json() const {
  json j = {{"corpus", corpus},
            {"n_nodes", n_nodes},
            {"first_year", first_year},
            {"last_year", last_year},
            {"out_degree", out_degree},
            {"trend_signal_strength", trend_signal_strength},
            {"trending_fraction", trending_fraction},
            {"topics", topics},
            {"words_per_topic", words_per_topic},
            {"background_words", background_words},
            {"words_per_document", words_per_document},
            {"topic_purity", topic_purity},
            {"affiliations", affiliations},
            {"base_future_citations", base_future_citations},
            {"trend_future_citations", trend_future_citations},
            {"seed", seed}};
  return j.dump(2);
}

SyntheticConfig SyntheticConfig::from_json(const std::string& text) {
  SyntheticConfig c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("synthetic config: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kParseError, "synthetic config must be a JSON object");
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "corpus") c.corpus = value.get<std::string>();
      else if (key == "n_nodes") c.n_nodes = value.get<std::size_t>();
      else if (key == "first_year") c.first_year = value.get<int>();
      else if (key == "last_year") c.last_year = value.get<int>();
      else if (key == "out_degree") c.out_degree = value.get<double>();
      else if (key == "trend_signal_strength") c.trend_signal_strength = value.get<double>();
      else if (key == "trending_fraction") c.trending_fraction = value.get<double>();
      else if (key == "topics") c.topics = value.get<std::size_t>();
      else if (key == "words_per_topic") c.words_per_topic = value.get<std::size_t>();
      else if (key == "background_words") c.background_words = value.get<std::size_t>();
      else if (key == "words_per_document") c.words_per_document = value.get<std::size_t>();
      else if (key == "topic_purity") c.topic_purity = value.get<double>();
      else if (key == "affiliations") c.affiliations = value.get<std::size_t>();
      else if (key == "base_future_citations") c.base_future_citations = value.get<double>();
      else if (key == "trend_future_citations") c.trend_future_citations = value.get<double>();
      else if (key == "seed") c.seed = value.get<std::uint64_t>();
      else throw Error(ErrorKind::kParseError, "synthetic config: unknown key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParseError, std::string("synthetic config: ") + e.what());
  }
  c.validate();
  return c;
}

namespace {

std::string node_id(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "P%06zu", i);
  return buf;
}

// Draws one index from `pool` with probability proportional to in_degree + 1.
std::size_t preferential_pick(const std::vector<std::size_t>& pool, const std::vector<std::size_t>& in_degree,
                              std::mt19937_64& rng) {
  double total = 0.0;
  for (std::size_t v : pool) total += static_cast<double>(in_degree[v] + 1);
  double u = uniform01(rng) * total;
  for (std::size_t v : pool) {
    u -= static_cast<double>(in_degree[v] + 1);
    if (u < 0.0) return v;
  }
  return pool.back();
}

}  // namespace

GraphBundle generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const std::size_t n = cfg.n_nodes;
  const auto span = static_cast<std::size_t>(cfg.last_year - cfg.first_year + 1);
  const double s = cfg.trend_signal_strength;

  GraphBundle bundle;
  bundle.corpus = cfg.corpus;
  bundle.nodes.resize(n);
  std::vector<char> trending(n, 0);

  for (std::size_t i = 0; i < n; ++i) {
    DocumentNode& node = bundle.nodes[i];
    node.id = node_id(i);
    node.year = cfg.first_year + static_cast<int>((i * span) / n);
    trending[i] = bernoulli(rng, cfg.trending_fraction) ? 1 : 0;

    const bool hot = trending[i] && bernoulli(rng, s);
    const std::size_t topic = hot ? 0 : uniform_index(rng, cfg.topics);
    std::string text;
    for (std::size_t w = 0; w < cfg.words_per_document; ++w) {
      if (!text.empty()) text.push_back(' ');
      if (bernoulli(rng, cfg.topic_purity)) {
        text += "t" + std::to_string(topic) + "w" + std::to_string(uniform_index(rng, cfg.words_per_topic));
      } else {
        text += "bg" + std::to_string(uniform_index(rng, cfg.background_words));
      }
    }
    node.title_abstract = std::move(text);

    const std::size_t n_aff = 1 + uniform_index(rng, 3);
    std::set<std::size_t> picked;
    while (picked.size() < std::min(n_aff, cfg.affiliations)) picked.insert(uniform_index(rng, cfg.affiliations));
    for (std::size_t a : picked) {
      char buf[48];
      std::snprintf(buf, sizeof buf, "Institute %03zu", a);
      node.affiliations.emplace_back(buf);
    }
  }

  std::vector<std::size_t> in_degree(n, 0);
  std::size_t year_begin = 0;  // first node of the current year
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0 && bundle.nodes[i].year != bundle.nodes[i - 1].year) year_begin = i;
    const std::size_t candidates = year_begin;  // every node of an earlier year
    if (candidates == 0) continue;
    const std::size_t k = std::min(candidates, 1 + poisson(rng, cfg.out_degree - 1.0));
    const bool focused = trending[i] && bernoulli(rng, s);

    std::vector<char> taken(candidates, 0);
    for (std::size_t draw = 0; draw < k; ++draw) {
      std::vector<std::size_t> pool;
      if (focused) {
        for (std::size_t j = 0; j < candidates; ++j) {
          if (trending[j] && !taken[j]) pool.push_back(j);
        }
      }
      if (pool.empty()) {
        for (std::size_t j = 0; j < candidates; ++j) {
          if (!taken[j]) pool.push_back(j);
        }
      }
      const std::size_t j = preferential_pick(pool, in_degree, rng);
      taken[j] = 1;
      bundle.edges.emplace_back(bundle.nodes[i].id, bundle.nodes[j].id);
    }
    for (std::size_t j = 0; j < candidates; ++j) in_degree[j] += taken[j] ? 1 : 0;
  }

  for (std::size_t i = 0; i < n; ++i) {
    const double future = cfg.base_future_citations + s * cfg.trend_future_citations * trending[i];
    bundle.nodes[i].citation_count = static_cast<std::int64_t>(in_degree[i] + poisson(rng, future));
  }
  return bundle;
}

std::vector<std::pair<std::string, SyntheticConfig>> synthetic_presets() {
  std::vector<std::pair<std::string, SyntheticConfig>> out;
  SyntheticConfig icml;
  icml.corpus = "icml-scale";
  out.emplace_back("icml-scale", icml);

  SyntheticConfig compact = icml;
  compact.corpus = "compact";
  compact.n_nodes = 900;
  compact.seed = 7;
  out.emplace_back("compact", compact);

  SyntheticConfig flat = compact;
  flat.corpus = "no-signal";
  flat.trend_signal_strength = 0.0;
  flat.seed = 11;
  out.emplace_back("no-signal", flat);
  return out;
}

}  // namespace citetrend
