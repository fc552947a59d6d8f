// Copyright 2026 The CLTV Authors.
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

#include <vector>

#include "cltv/metrics.h"
#include "cltv/rng.h"

namespace {

void BM_Auc(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  cltv::Rng rng(5);
  std::vector<double> scores(n);
  std::vector<bool> labels(n);
  for (size_t i = 0; i < n; ++i) {
    scores[i] = cltv::UniformUnit(rng);
    labels[i] = cltv::UniformUnit(rng) < scores[i];
  }
  for (auto _ : state) benchmark::DoNotOptimize(cltv::Auc(scores, labels));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Auc)->Arg(1000)->Arg(100000);

void BM_Spearman(benchmark::State& state) {
  const auto n = static_cast<size_t>(state.range(0));
  cltv::Rng rng(6);
  std::vector<double> x(n), y(n);
  for (size_t i = 0; i < n; ++i) {
    x[i] = cltv::UniformUnit(rng);
    y[i] = x[i] + cltv::UniformUnit(rng);
  }
  for (auto _ : state) benchmark::DoNotOptimize(cltv::Spearman(x, y));
}
BENCHMARK(BM_Spearman)->Arg(1000)->Arg(100000);

}  // namespace
