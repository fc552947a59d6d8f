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

#ifndef CLTV_DATAGEN_H_
#define CLTV_DATAGEN_H_

#include <cstdint>
#include <string>
#include <vector>

#include "cltv/events.h"

namespace cltv {

// Synthetic e-commerce log with a planted latent customer value.
//
// Each customer draws z ~ N(0, 1); latent value is exp(latent_value_spread * z)
// and the value tier is the n_tiers-quantile of z. Products are assigned tiers
// round-robin over their popularity rank, so every tier has the same Zipf
// profile. A view or order picks a product of the customer's own tier with
// probability affinity_strength and a catalogue-wide Zipf draw otherwise, so
// tier is visible only through who co-views what. View counts do not depend on
// value.
//
// Churners (probability rising as z falls, averaging churn_fraction) place no
// orders in the final 365 days of the horizon; everyone else places at least
// one there.
struct GenConfig {
  int64_t n_customers = 5000;
  int64_t n_products = 500;
  int64_t horizon_days = 730;
  uint64_t seed = 1;
  Timestamp start = 1420070400;  // 2015-01-01T00:00:00Z
  double latent_value_spread = 0.8;
  double product_popularity_exponent = 1.0;
  double affinity_strength = 0.9;
  double churn_fraction = 0.35;
  // Log-odds of churning per unit of z.
  double churn_value_slope = 1.5;
  int n_tiers = 4;
  double views_per_year = 24.0;
  double sessions_per_year = 12.0;
  double orders_per_year = 3.0;
  double mean_item_value = 40.0;
  double return_rate = 0.2;
  double new_collection_fraction = 0.3;
  int n_countries = 8;
  double missing_age_fraction = 0.2;

  // Throws std::invalid_argument naming the offending field.
  void Validate() const;
  bool operator==(const GenConfig&) const = default;
};

struct CustomerTruth {
  std::string customer_id;
  double latent_value = 0.0;
  int tier = 0;
  bool churner = false;
};

struct GeneratedData {
  EventLog events;
  // Sorted by customer_id. Never consumed by the pipeline.
  std::vector<CustomerTruth> truth;
};

GeneratedData Generate(const GenConfig& config);

std::string TruthToJson(const std::vector<CustomerTruth>& truth);

}  // namespace cltv

#endif  // CLTV_DATAGEN_H_
