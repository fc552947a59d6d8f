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

#ifndef CLTV_FEATURES_H_
#define CLTV_FEATURES_H_

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cltv/dataset.h"
#include "cltv/events.h"

namespace cltv {

inline constexpr int64_t kQuarterDays = 91;

// Handcrafted per-customer features over the feature window. Day-valued
// fields are in days; "since" fields are measured back from the window end and
// date averages forward from the window start. Missing values are NaN.
struct FeatureVector {
  std::string customer_id;
  double num_orders = 0;
  double std_order_dates = 0;
  double num_sessions_last_quarter = 0;
  double num_items_new_collection = 0;
  double num_items_kept = 0;
  double net_sales = 0;
  double days_first_to_last_session = 0;
  double num_sessions = 0;
  // From the first event ever seen before the window end.
  double customer_tenure = 0;
  double total_items_ordered = 0;
  double days_since_last_order = kMissing;
  double days_since_last_session = kMissing;
  double std_session_dates = 0;
  double orders_last_quarter = 0;
  double age = kMissing;
  double avg_order_date = kMissing;
  double total_ordered_value = 0;
  double num_products_viewed = 0;
  double days_since_first_order_in_window = kMissing;
  double avg_session_date = kMissing;
  double num_sessions_previous_quarter = 0;
  // Empty when unknown.
  std::string country;
};

struct NumericFeature {
  std::string_view name;
  double FeatureVector::*field;
};

// The 21 numeric features in column order; `country` follows them.
extern const std::array<NumericFeature, 21> kNumericFeatures;
inline constexpr std::string_view kCountryColumn = "country";

// One vector per customer with at least one feature-window event, sorted by id.
// Only events before split.feature_end() are read. Orders are grouped by
// (customer, timestamp); each order_placed event is one item. Products flagged
// with attrs["is_new_collection"] in {"1", "true"} count as new collection.
std::vector<FeatureVector> ComputeFeatures(const EventLog& events, const TimeSplit& split);

// Maps category strings to ids. Up to kMaxSubsetCardinality categories are
// split by subset; above that the ids are ranks by descending frequency and
// split by threshold. Unseen strings map to the reserved id size().
class CategoryEncoder {
 public:
  static constexpr size_t kMaxSubsetCardinality = 10;

  CategoryEncoder() = default;
  // Empty strings are treated as missing and ignored.
  static CategoryEncoder Fit(std::span<const std::string> values);
  static CategoryEncoder FromColumn(const ColumnSpec& spec);

  size_t size() const { return categories_.size(); }
  bool ordinal() const { return categories_.size() > kMaxSubsetCardinality; }
  uint32_t unknown_id() const { return static_cast<uint32_t>(categories_.size()); }
  const std::vector<std::string>& categories() const { return categories_; }
  // NaN for an empty string.
  double Encode(const std::string& value) const;
  ColumnSpec Spec(std::string name) const;

 private:
  // Descending frequency, ties by name.
  std::vector<std::string> categories_;
};

// Numeric columns followed by the encoded country column.
FeatureMatrix EncodeFeatures(std::span<const FeatureVector> vectors,
                             const CategoryEncoder& country);

// Header "customer_id,<names...>,country"; missing cells are empty.
void WriteFeaturesCsv(std::span<const FeatureVector> vectors, std::ostream& out);

}  // namespace cltv

#endif  // CLTV_FEATURES_H_
