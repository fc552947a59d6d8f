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

#ifndef CLTV_LABELS_H_
#define CLTV_LABELS_H_

#include <cstddef>
#include <string>
#include <vector>

#include "cltv/events.h"

namespace cltv {

struct LabelRecord {
  std::string customer_id;
  // Orders minus returns inside the label window, clamped at zero.
  double net_spend = 0.0;
  // No orders placed inside the label window.
  bool churned = false;
  // Average fractional rank of net_spend within the cohort, in (0, 1).
  double percentile = 0.0;

  bool operator==(const LabelRecord&) const = default;
};

struct LabelSet {
  // Sorted by customer_id.
  std::vector<LabelRecord> records;
  // Customers whose label-window returns exceeded their label-window orders.
  size_t clamped_customers = 0;
};

// The cohort is every customer with at least one event in the feature window.
// Throws DataError when that cohort is empty.
LabelSet DeriveLabels(const EventLog& events, const TimeSplit& split);

}  // namespace cltv

#endif  // CLTV_LABELS_H_
