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

#include "cltv/pairgen.h"
#include "cltv/rng.h"
#include "cltv/sgns.h"

namespace {

cltv::CustomerIndex MakeIndex(size_t n) {
  std::vector<std::string> ids;
  for (size_t i = 0; i < n; ++i) ids.push_back("c" + std::to_string(100000 + i));
  return cltv::CustomerIndex(std::move(ids));
}

void BM_SgdStep(benchmark::State& state) {
  const int dim = static_cast<int>(state.range(0));
  cltv::SgnsConfig config;
  config.dim = dim;
  cltv::EmbeddingModel model = cltv::InitModel(MakeIndex(1000), config);
  cltv::Rng rng(7);
  std::vector<uint32_t> negatives(5);
  for (auto _ : state) {
    const cltv::TrainingPair pair{static_cast<uint32_t>(cltv::UniformIndex(rng, 1000)),
                                  static_cast<uint32_t>(cltv::UniformIndex(rng, 1000))};
    for (uint32_t& n : negatives) n = static_cast<uint32_t>(cltv::UniformIndex(rng, 1000));
    benchmark::DoNotOptimize(cltv::SgdStep(model, pair, negatives, 0.025));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SgdStep)->Arg(16)->Arg(64)->Arg(128);

void BM_GeneratePairs(benchmark::State& state) {
  std::vector<uint32_t> stream(static_cast<size_t>(state.range(0)));
  for (size_t i = 0; i < stream.size(); ++i) stream[i] = static_cast<uint32_t>(i);
  for (auto _ : state) benchmark::DoNotOptimize(cltv::GeneratePairs(stream, 11));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GeneratePairs)->Arg(100)->Arg(10000);

void BM_NegativeSample(benchmark::State& state) {
  std::vector<uint64_t> counts(10000);
  for (size_t i = 0; i < counts.size(); ++i) counts[i] = 1 + i % 97;
  const cltv::NegativeTable table(counts, 0.75);
  cltv::Rng rng(3);
  std::vector<uint32_t> out;
  for (auto _ : state) {
    table.Sample(5, 17, rng, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_NegativeSample);

}  // namespace
