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

#ifndef CLTV_MODELING_H_
#define CLTV_MODELING_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "cltv/dataset.h"
#include "cltv/events.h"
#include "cltv/labels.h"
#include "cltv/sgns.h"

namespace cltv {

// One numeric column per embedding dimension, rows keyed by customer id.
FeatureMatrix EmbeddingFeatures(const EmbeddingTable& table);

struct LabeledDataset {
  // Handcrafted columns, then embedding columns when requested. Rows follow
  // labels.records.
  FeatureMatrix x;
  LabelSet labels;
  std::vector<double> churn;
  std::vector<double> percentile;
  std::vector<double> net_spend;

  LabeledDataset SelectRows(std::span<const size_t> rows) const;
};

// Customers missing from `embeddings` get missing embedding cells.
LabeledDataset BuildLabeledDataset(const EventLog& events, const TimeSplit& split,
                                   const EmbeddingTable* embeddings = nullptr);

struct EmbeddingRun {
  EmbeddingModel model;
  TrainResult result;
  size_t pairs = 0;
  // Set when the run was warm-started.
  std::optional<CohortMap> cohorts;
};

// View streams, pairs and negative table from the feature window, then SGNS.
// With a prior model the run is warm-started and uses the ordered epoch
// schedule. Throws DataError when the window has no usable view stream.
EmbeddingRun TrainEmbeddings(const EventLog& events, const TimeSplit& split,
                             const SgnsConfig& config, const EmbeddingModel* prior = nullptr);

struct RowSplit {
  std::vector<size_t> train;
  std::vector<size_t> test;
};

// Random split with exactly `test_size` test rows; both parts sorted. Throws
// std::invalid_argument unless 0 < test_size < n.
RowSplit RandomRowSplit(size_t n, size_t test_size, uint64_t seed);

}  // namespace cltv

#endif  // CLTV_MODELING_H_
