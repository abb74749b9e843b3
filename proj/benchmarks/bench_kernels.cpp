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

#include <benchmark/benchmark.h>

#include <random>
#include <utility>
#include <vector>

#include "citetrend/tensor.hpp"

namespace {

using citetrend::SparseMatrix;
using citetrend::Tensor;

Tensor random_tensor(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor t(rows, cols);
  for (double& v : t.data()) v = u(rng);
  return t;
}

// Square-ish shapes from the model: rows x in times in x out.
void BM_Gemm(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(2));
  const Tensor a = random_tensor(m, k, 1), b = random_tensor(k, n, 2);
  Tensor c(m, n);
  for (auto _ : state) {
    citetrend::gemm(a, b, c);
    benchmark::DoNotOptimize(c.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * m * k * n));
}
BENCHMARK(BM_Gemm)->Args({2669, 202, 202})->Args({2669, 202, 30})->Args({2669, 100, 100});

void BM_GemmAtB(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  const auto n = static_cast<std::size_t>(state.range(2));
  const Tensor a = random_tensor(m, k, 3), b = random_tensor(m, n, 4);
  Tensor c(k, n);
  for (auto _ : state) {
    c.fill(0.0);
    citetrend::gemm_at_b_accumulate(a, b, c);
    benchmark::DoNotOptimize(c.data().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * m * k * n));
}
BENCHMARK(BM_GemmAtB)->Args({2669, 202, 202})->Args({2669, 202, 30});

// tf-idf shaped sparse input: density about 3%.
void BM_Spmm(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto cols = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(5);
  SparseMatrix s(rows, cols);
  std::vector<std::pair<std::size_t, double>> entries;
  for (std::size_t r = 0; r < rows; ++r) {
    entries.clear();
    for (std::size_t c = 0; c < cols; ++c) {
      if (rng() % 32 == 0) entries.emplace_back(c, 1.0);
    }
    s.push_row(entries);
  }
  const Tensor b = random_tensor(cols, 100, 6);
  Tensor c(rows, 100);
  for (auto _ : state) {
    citetrend::spmm(s, b, c);
    benchmark::DoNotOptimize(c.data().data());
  }
}
BENCHMARK(BM_Spmm)->Args({2669, 900});

}  // namespace
