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

#include "cltv/modeling.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "cltv/error.h"
#include "cltv/features.h"
#include "cltv/pairgen.h"
#include "cltv/rng.h"

namespace cltv {

FeatureMatrix EmbeddingFeatures(const EmbeddingTable& table) {
  std::vector<ColumnSpec> columns;
  for (const std::string& name : table.ColumnNames()) {
    columns.push_back({name, ColumnKind::kNumeric, {}});
  }
  FeatureMatrix m(table.ids, std::move(columns));
  for (size_t r = 0; r < table.ids.size(); ++r) {
    const auto row = table.row(r);
    for (size_t c = 0; c < row.size(); ++c) m.at(r, c) = row[c];
  }
  return m;
}

LabeledDataset LabeledDataset::SelectRows(std::span<const size_t> rows) const {
  LabeledDataset out;
  out.x = x.SelectRows(rows);
  out.labels.clamped_customers = labels.clamped_customers;
  for (size_t r : rows) {
    out.labels.records.push_back(labels.records[r]);
    out.churn.push_back(churn[r]);
    out.percentile.push_back(percentile[r]);
    out.net_spend.push_back(net_spend[r]);
  }
  return out;
}

LabeledDataset BuildLabeledDataset(const EventLog& events, const TimeSplit& split,
                                   const EmbeddingTable* embeddings) {
  LabeledDataset data;
  data.labels = DeriveLabels(events, split);
  const std::vector<FeatureVector> vectors = ComputeFeatures(events, split);
  if (vectors.size() != data.labels.records.size()) {
    throw DataError("feature and label cohorts differ");
  }
  std::vector<std::string> countries;
  for (const FeatureVector& v : vectors) countries.push_back(v.country);
  data.x = EncodeFeatures(vectors, CategoryEncoder::Fit(countries));
  if (embeddings != nullptr) data.x = data.x.JoinColumns(EmbeddingFeatures(*embeddings));
  for (size_t i = 0; i < vectors.size(); ++i) {
    const LabelRecord& rec = data.labels.records[i];
    if (rec.customer_id != vectors[i].customer_id) {
      throw DataError("feature and label cohorts differ at " + rec.customer_id);
    }
    data.churn.push_back(rec.churned ? 1.0 : 0.0);
    data.percentile.push_back(rec.percentile);
    data.net_spend.push_back(rec.net_spend);
  }
  return data;
}

EmbeddingRun TrainEmbeddings(const EventLog& events, const TimeSplit& split,
                             const SgnsConfig& config, const EmbeddingModel* prior) {
  config.Validate();
  const ViewStreams streams = BuildViewStreams(events, split);
  if (streams.streams.empty()) {
    throw DataError("no product viewed by two or more customers in the feature window");
  }
  const std::vector<TrainingPair> pairs = GenerateAllPairs(streams, config.window_length);
  const NegativeTable table = BuildNegativeTable(streams, config.exponent);
  EmbeddingRun run;
  run.pairs = pairs.size();
  if (prior != nullptr) {
    run.cohorts = CohortMap::FromIndices(prior->index(), streams.index);
    run.model = WarmStartInit(*prior, *run.cohorts, config);
    run.result = Train(pairs, run.model, table, config, &*run.cohorts);
  } else {
    run.model = InitModel(streams.index, config);
    run.result = Train(pairs, run.model, table, config);
  }
  return run;
}

RowSplit RandomRowSplit(size_t n, size_t test_size, uint64_t seed) {
  if (test_size == 0 || test_size >= n) {
    throw std::invalid_argument("test size must be between 1 and n-1");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(MixSeed(seed, 0x5e7));
  Shuffle(order.begin(), order.end(), rng);
  RowSplit split;
  split.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(test_size));
  split.train.assign(order.begin() + static_cast<std::ptrdiff_t>(test_size), order.end());
  std::sort(split.test.begin(), split.test.end());
  std::sort(split.train.begin(), split.train.end());
  return split;
}

}  // namespace cltv
