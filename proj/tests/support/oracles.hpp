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
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

namespace citetrend::testing {

struct BruteMetrics {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0.0, recall = 0.0, f1 = 0.0;
};

// Straight confusion-matrix loop over logits thresholded at sigmoid 0.5.
inline BruteMetrics brute_metrics(const std::vector<double>& logits, const std::vector<int>& labels) {
  BruteMetrics m;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double prob = 1.0 / (1.0 + std::exp(-logits[i]));
    const bool p = prob > 0.5;
    const bool a = labels[i] == 1;
    m.tp += p && a;
    m.fp += p && !a;
    m.fn += !p && a;
    m.tn += !p && !a;
  }
  if (m.tp + m.fp) m.precision = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fp);
  if (m.tp + m.fn) m.recall = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  if (m.tp) m.f1 = 2.0 * (m.precision * m.recall) / (m.precision + m.recall);
  return m;
}

// Per-year threshold: sort ascending, take the ceil(p * n)-th value.
inline std::map<int, std::int64_t> brute_thresholds(const std::vector<int>& years,
                                                    const std::vector<std::int64_t>& counts, double p) {
  std::map<int, std::vector<std::int64_t>> by_year;
  for (std::size_t i = 0; i < years.size(); ++i) by_year[years[i]].push_back(counts[i]);
  std::map<int, std::int64_t> out;
  for (auto& [year, v] : by_year) {
    std::sort(v.begin(), v.end());
    std::size_t k = 0;
    while (static_cast<double>(k) < p * static_cast<double>(v.size()) - 1e-9) ++k;
    k = std::clamp<std::size_t>(k, 1, v.size());
    out[year] = v[k - 1];
  }
  return out;
}

}  // namespace citetrend::testing
