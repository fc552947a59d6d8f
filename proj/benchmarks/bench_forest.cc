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

#include <cmath>
#include <vector>

#include "cltv/forest.h"
#include "cltv/rng.h"

namespace {

struct Data {
  cltv::FeatureMatrix x;
  std::vector<double> y;
};

Data MakeData(size_t rows, size_t cols) {
  std::vector<std::string> ids(rows);
  std::vector<cltv::ColumnSpec> specs;
  for (size_t c = 0; c < cols; ++c) specs.push_back({"f" + std::to_string(c), {}, {}});
  Data d{cltv::FeatureMatrix(std::move(ids), std::move(specs)), {}};
  cltv::Rng rng(11);
  for (size_t r = 0; r < rows; ++r) {
    double s = 0;
    for (size_t c = 0; c < cols; ++c) {
      const double v = cltv::UniformUnit(rng);
      d.x.at(r, c) = v;
      if (c < 3) s += v;
    }
    d.y.push_back(s + 0.3 * cltv::UniformUnit(rng) > 1.6 ? 1.0 : 0.0);
  }
  return d;
}

void BM_FitForest(benchmark::State& state) {
  const Data d = MakeData(static_cast<size_t>(state.range(0)), 30);
  cltv::ForestConfig config;
  config.n_trees = 20;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        cltv::FitForest(d.x, d.y, cltv::Task::kChurnClassifier, config).trees().size());
  }
}
BENCHMARK(BM_FitForest)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_PredictRows(benchmark::State& state) {
  const Data d = MakeData(5000, 30);
  cltv::ForestConfig config;
  config.n_trees = 100;
  const cltv::ForestModel model = cltv::FitForest(d.x, d.y, cltv::Task::kChurnClassifier, config);
  for (auto _ : state) benchmark::DoNotOptimize(cltv::PredictRows(model, d.x));
  state.SetItemsProcessed(state.iterations() * 5000);
}
BENCHMARK(BM_PredictRows)->Unit(benchmark::kMillisecond);

}  // namespace
