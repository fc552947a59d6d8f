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

#ifndef CLTV_UPLIFT_H_
#define CLTV_UPLIFT_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cltv/events.h"
#include "cltv/forest.h"
#include "cltv/sgns.h"

namespace cltv {

struct TInterval {
  double mean = 0.0;
  double std_dev = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  size_t n = 0;
};

// Student-t interval for the mean. Throws std::invalid_argument for n < 2.
TInterval StudentTInterval(std::span<const double> values, double confidence = 0.95);

struct UpliftConfig {
  int n_seeds = 10;
  size_t test_size = 2000;
  uint64_t seed = 1;
  double confidence = 0.95;
  SgnsConfig sgns;
  ForestConfig forest;
  // Diagnostic: arm (b) reuses arm (a)'s feature set.
  bool identical_arms = false;
};

struct UpliftSeedResult {
  uint64_t seed = 0;
  double auc_features = 0.0;
  double auc_combined = 0.0;
  double uplift = 0.0;
};

struct UpliftResult {
  std::vector<UpliftSeedResult> seeds;
  TInterval interval;

  std::string ToJson() const;
};

// Per seed: trains embeddings, draws a random test set, fits churn forests on
// handcrafted features alone and with embedding columns, and records the test
// AUC difference. Throws std::invalid_argument for n_seeds < 5.
UpliftResult RunUpliftExperiment(const EventLog& events, const TimeSplit& split,
                                 const UpliftConfig& config);

}  // namespace cltv

#endif  // CLTV_UPLIFT_H_
