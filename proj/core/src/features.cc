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

#include "cltv/features.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <tuple>
#include <unordered_map>

namespace cltv {

const std::array<NumericFeature, 21> kNumericFeatures = {{
    {"num_orders", &FeatureVector::num_orders},
    {"std_order_dates", &FeatureVector::std_order_dates},
    {"num_sessions_last_quarter", &FeatureVector::num_sessions_last_quarter},
    {"num_items_new_collection", &FeatureVector::num_items_new_collection},
    {"num_items_kept", &FeatureVector::num_items_kept},
    {"net_sales", &FeatureVector::net_sales},
    {"days_first_to_last_session", &FeatureVector::days_first_to_last_session},
    {"num_sessions", &FeatureVector::num_sessions},
    {"customer_tenure", &FeatureVector::customer_tenure},
    {"total_items_ordered", &FeatureVector::total_items_ordered},
    {"days_since_last_order", &FeatureVector::days_since_last_order},
    {"days_since_last_session", &FeatureVector::days_since_last_session},
    {"std_session_dates", &FeatureVector::std_session_dates},
    {"orders_last_quarter", &FeatureVector::orders_last_quarter},
    {"age", &FeatureVector::age},
    {"avg_order_date", &FeatureVector::avg_order_date},
    {"total_ordered_value", &FeatureVector::total_ordered_value},
    {"num_products_viewed", &FeatureVector::num_products_viewed},
    {"days_since_first_order_in_window", &FeatureVector::days_since_first_order_in_window},
    {"avg_session_date", &FeatureVector::avg_session_date},
    {"num_sessions_previous_quarter", &FeatureVector::num_sessions_previous_quarter},
}};

namespace {

struct CustomerHistory {
  bool in_window = false;
  Timestamp first_ever = 0;
  bool seen = false;
  std::vector<Timestamp> order_items;  // one entry per item
  std::vector<double> item_values;
  double new_collection_items = 0;
  double returned_items = 0;
  std::vector<double> returned_values;
  std::vector<Timestamp> sessions;
  std::set<std::string_view> viewed;
  // Latest attribute value before the window end: (ts, value).
  std::pair<Timestamp, std::string> country{INT64_MIN, ""};
  std::pair<Timestamp, std::string> birth_year{INT64_MIN, ""};
};

void KeepLatest(std::pair<Timestamp, std::string>& slot, Timestamp ts,
                const std::string& value) {
  if (std::tie(ts, value) > std::tie(slot.first, slot.second)) slot = {ts, value};
}

double SortedSum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double total = 0;
  for (double v : values) total += v;
  return total;
}

double Mean(std::span<const double> xs) {
  double total = 0;
  for (double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

double PopulationStd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = Mean(xs);
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

int CivilYear(Timestamp ts) {
  using namespace std::chrono;
  const auto d = floor<days>(sys_seconds{seconds{ts}});
  return static_cast<int>(year_month_day{d}.year());
}

bool IsTruthy(const std::string& s) { return s == "1" || s == "true" || s == "True"; }

}  // namespace

std::vector<FeatureVector> ComputeFeatures(const EventLog& events,
                                           const TimeSplit& split) {
  const Timestamp start = split.feature_start();
  const Timestamp end = split.feature_end();
  std::map<std::string_view, CustomerHistory> history;
  for (const CustomerEvent& e : events) {
    if (e.ts >= end) continue;
    CustomerHistory& h = history[e.customer_id];
    h.first_ever = h.seen ? std::min(h.first_ever, e.ts) : e.ts;
    h.seen = true;
    if (auto it = e.attrs.find("country"); it != e.attrs.end()) {
      KeepLatest(h.country, e.ts, it->second);
    }
    if (auto it = e.attrs.find("birth_year"); it != e.attrs.end()) {
      KeepLatest(h.birth_year, e.ts, it->second);
    }
    if (e.ts < start) continue;
    h.in_window = true;
    switch (e.kind) {
      case EventKind::kProductView:
        h.viewed.insert(e.product_id);
        break;
      case EventKind::kSessionStart:
        h.sessions.push_back(e.ts);
        break;
      case EventKind::kOrderPlaced: {
        h.order_items.push_back(e.ts);
        h.item_values.push_back(e.value);
        auto it = e.attrs.find("is_new_collection");
        if (it != e.attrs.end() && IsTruthy(it->second)) h.new_collection_items += 1;
        break;
      }
      case EventKind::kItemReturned:
        h.returned_items += 1;
        h.returned_values.push_back(e.value);
        break;
    }
  }

  auto day_of = [&](Timestamp ts) {
    return static_cast<double>(ts - start) / kSecondsPerDay;
  };
  auto days_before_end = [&](Timestamp ts) {
    return static_cast<double>(end - ts) / kSecondsPerDay;
  };
  const Timestamp last_quarter = end - kQuarterDays * kSecondsPerDay;
  const Timestamp previous_quarter = end - 2 * kQuarterDays * kSecondsPerDay;

  std::vector<FeatureVector> out;
  for (auto& [id, h] : history) {
    if (!h.in_window) continue;
    FeatureVector f;
    f.customer_id = std::string(id);

    std::vector<Timestamp> orders = h.order_items;
    std::sort(orders.begin(), orders.end());
    orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
    std::vector<double> order_days;
    for (Timestamp t : orders) order_days.push_back(day_of(t));
    f.num_orders = static_cast<double>(orders.size());
    f.std_order_dates = PopulationStd(order_days);
    f.orders_last_quarter = static_cast<double>(
        std::count_if(orders.begin(), orders.end(),
                      [&](Timestamp t) { return t >= last_quarter; }));
    f.total_items_ordered = static_cast<double>(h.order_items.size());
    f.num_items_new_collection = h.new_collection_items;
    f.num_items_kept = std::max(0.0, f.total_items_ordered - h.returned_items);
    f.total_ordered_value = SortedSum(h.item_values);
    f.net_sales = f.total_ordered_value - SortedSum(h.returned_values);
    if (!orders.empty()) {
      f.days_since_last_order = days_before_end(orders.back());
      f.days_since_first_order_in_window = days_before_end(orders.front());
      f.avg_order_date = Mean(order_days);
    }

    std::sort(h.sessions.begin(), h.sessions.end());
    std::vector<double> session_days;
    for (Timestamp t : h.sessions) session_days.push_back(day_of(t));
    f.num_sessions = static_cast<double>(h.sessions.size());
    f.std_session_dates = PopulationStd(session_days);
    for (Timestamp t : h.sessions) {
      if (t >= last_quarter) {
        f.num_sessions_last_quarter += 1;
      } else if (t >= previous_quarter) {
        f.num_sessions_previous_quarter += 1;
      }
    }
    if (!h.sessions.empty()) {
      f.days_first_to_last_session =
          static_cast<double>(h.sessions.back() - h.sessions.front()) / kSecondsPerDay;
      f.days_since_last_session = days_before_end(h.sessions.back());
      f.avg_session_date = Mean(session_days);
    }

    f.customer_tenure = days_before_end(h.first_ever);
    f.num_products_viewed = static_cast<double>(h.viewed.size());
    f.country = h.country.second;
    if (!h.birth_year.second.empty()) {
      try {
        f.age = CivilYear(end) - std::stoi(h.birth_year.second);
      } catch (const std::exception&) {
        f.age = kMissing;
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

CategoryEncoder CategoryEncoder::Fit(std::span<const std::string> values) {
  std::map<std::string, size_t> counts;
  for (const std::string& v : values) {
    if (!v.empty()) ++counts[v];
  }
  std::vector<std::pair<std::string, size_t>> ranked(counts.begin(), counts.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  CategoryEncoder enc;
  for (auto& [name, count] : ranked) enc.categories_.push_back(name);
  return enc;
}

CategoryEncoder CategoryEncoder::FromColumn(const ColumnSpec& spec) {
  CategoryEncoder enc;
  enc.categories_ = spec.categories;
  return enc;
}

double CategoryEncoder::Encode(const std::string& value) const {
  if (value.empty()) return kMissing;
  for (size_t i = 0; i < categories_.size(); ++i) {
    if (categories_[i] == value) return static_cast<double>(i);
  }
  return static_cast<double>(unknown_id());
}

ColumnSpec CategoryEncoder::Spec(std::string name) const {
  return {std::move(name), ordinal() ? ColumnKind::kOrdinal : ColumnKind::kCategorical,
          categories_};
}

FeatureMatrix EncodeFeatures(std::span<const FeatureVector> vectors,
                             const CategoryEncoder& country) {
  std::vector<std::string> ids;
  for (const FeatureVector& v : vectors) ids.push_back(v.customer_id);
  std::vector<ColumnSpec> columns;
  for (const NumericFeature& f : kNumericFeatures) {
    columns.push_back({std::string(f.name), ColumnKind::kNumeric, {}});
  }
  columns.push_back(country.Spec(std::string(kCountryColumn)));
  FeatureMatrix m(std::move(ids), std::move(columns));
  for (size_t r = 0; r < vectors.size(); ++r) {
    for (size_t c = 0; c < kNumericFeatures.size(); ++c) {
      m.at(r, c) = vectors[r].*(kNumericFeatures[c].field);
    }
    m.at(r, kNumericFeatures.size()) = country.Encode(vectors[r].country);
  }
  return m;
}

void WriteFeaturesCsv(std::span<const FeatureVector> vectors, std::ostream& out) {
  out << "customer_id";
  for (const NumericFeature& f : kNumericFeatures) out << ',' << f.name;
  out << ',' << kCountryColumn << '\n';
  char buf[32];
  for (const FeatureVector& v : vectors) {
    out << v.customer_id;
    for (const NumericFeature& f : kNumericFeatures) {
      const double x = v.*(f.field);
      out << ',';
      if (!IsMissing(x)) {
        std::snprintf(buf, sizeof(buf), "%.17g", x);
        out << buf;
      }
    }
    out << ',' << v.country << '\n';
  }
}

}  // namespace cltv
