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

#include "cltv/labels.h"

#include <algorithm>
#include <map>

#include "cltv/error.h"
#include "cltv/ranks.h"

namespace cltv {

namespace {

struct LabelAccumulator {
  std::vector<double> ordered;
  std::vector<double> returned;
};

// Summing in sorted order makes the result independent of log order.
double SortedSum(std::vector<double>& values) {
  std::sort(values.begin(), values.end());
  double total = 0.0;
  for (double v : values) total += v;
  return total;
}

}  // namespace

LabelSet DeriveLabels(const EventLog& events, const TimeSplit& split) {
  std::map<std::string, LabelAccumulator> cohort;
  for (const CustomerEvent& e : events) {
    if (split.InFeatureWindow(e.ts)) cohort.try_emplace(e.customer_id);
  }
  if (cohort.empty()) {
    throw DataError("empty cohort: no customer has events in the feature window");
  }
  for (const CustomerEvent& e : events) {
    if (!split.InLabelWindow(e.ts)) continue;
    auto it = cohort.find(e.customer_id);
    if (it == cohort.end()) continue;
    if (e.kind == EventKind::kOrderPlaced) {
      it->second.ordered.push_back(e.value);
    } else if (e.kind == EventKind::kItemReturned) {
      it->second.returned.push_back(e.value);
    }
  }

  LabelSet out;
  out.records.reserve(cohort.size());
  std::vector<double> spend;
  spend.reserve(cohort.size());
  for (auto& [id, acc] : cohort) {
    LabelRecord r;
    r.customer_id = id;
    r.net_spend = SortedSum(acc.ordered) - SortedSum(acc.returned);
    if (r.net_spend < 0.0) {
      r.net_spend = 0.0;
      ++out.clamped_customers;
    }
    r.churned = acc.ordered.empty();
    spend.push_back(r.net_spend);
    out.records.push_back(std::move(r));
  }
  const std::vector<double> pct = FractionalRanks(spend);
  for (size_t i = 0; i < pct.size(); ++i) out.records[i].percentile = pct[i];
  return out;
}

}  // namespace cltv
