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

#ifndef CLTV_EVENTS_H_
#define CLTV_EVENTS_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cltv {

// Epoch seconds, UTC.
using Timestamp = int64_t;

inline constexpr int64_t kSecondsPerDay = 86400;
inline constexpr int64_t kDaysPerYear = 365;

enum class EventKind {
  kProductView,
  kSessionStart,
  kOrderPlaced,
  kItemReturned,
};

std::string_view EventKindName(EventKind kind);
std::optional<EventKind> ParseEventKind(std::string_view name);

struct CustomerEvent {
  std::string customer_id;
  Timestamp ts = 0;
  EventKind kind = EventKind::kProductView;
  // Empty for session starts.
  std::string product_id;
  // Order gross value or returned value; zero for views and sessions.
  double value = 0.0;
  std::map<std::string, std::string> attrs;

  bool operator==(const CustomerEvent&) const = default;
};

using EventLog = std::vector<CustomerEvent>;

// Throws DataError on the first event violating the schema: negative or
// non-finite value, nonzero value on a view/session, missing product id, or a
// return with no earlier order of that product by the same customer.
void ValidateEventLog(const EventLog& events);

// Stable ordering by (ts, customer_id, kind, product_id).
void SortEvents(EventLog& events);

// Feature window [feature_start, feature_end) and label window
// [feature_end, label_end).
class TimeSplit {
 public:
  // Throws std::invalid_argument unless feature_start < feature_end <= label_end.
  TimeSplit(Timestamp feature_start, Timestamp feature_end, Timestamp label_end);

  // Two consecutive windows of `days` each.
  static TimeSplit FromStart(Timestamp feature_start,
                             int64_t feature_days = kDaysPerYear,
                             int64_t label_days = kDaysPerYear);

  Timestamp feature_start() const { return feature_start_; }
  Timestamp feature_end() const { return feature_end_; }
  Timestamp label_end() const { return label_end_; }

  bool InFeatureWindow(Timestamp ts) const {
    return ts >= feature_start_ && ts < feature_end_;
  }
  bool InLabelWindow(Timestamp ts) const {
    return ts >= feature_end_ && ts < label_end_;
  }
  double FeatureDays() const {
    return static_cast<double>(feature_end_ - feature_start_) / kSecondsPerDay;
  }

  bool operator==(const TimeSplit&) const = default;

 private:
  Timestamp feature_start_;
  Timestamp feature_end_;
  Timestamp label_end_;
};

// Accepts integer epoch seconds or "YYYY-MM-DD[THH:MM:SS[Z]]".
std::optional<Timestamp> ParseTimestamp(std::string_view text);
std::string FormatTimestamp(Timestamp ts);

}  // namespace cltv

#endif  // CLTV_EVENTS_H_
