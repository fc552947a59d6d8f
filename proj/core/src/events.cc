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

#include "cltv/events.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "cltv/error.h"

namespace cltv {

std::string_view EventKindName(EventKind kind) {
  switch (kind) {
    case EventKind::kProductView:
      return "product_view";
    case EventKind::kSessionStart:
      return "session_start";
    case EventKind::kOrderPlaced:
      return "order_placed";
    case EventKind::kItemReturned:
      return "item_returned";
  }
  return "unknown";
}

std::optional<EventKind> ParseEventKind(std::string_view name) {
  for (EventKind kind :
       {EventKind::kProductView, EventKind::kSessionStart,
        EventKind::kOrderPlaced, EventKind::kItemReturned}) {
    if (EventKindName(kind) == name) return kind;
  }
  return std::nullopt;
}

namespace {

bool NeedsProduct(EventKind kind) { return kind != EventKind::kSessionStart; }

bool CarriesValue(EventKind kind) {
  return kind == EventKind::kOrderPlaced || kind == EventKind::kItemReturned;
}

std::string Describe(const CustomerEvent& e) {
  return "event(customer=" + e.customer_id + ", ts=" + std::to_string(e.ts) +
         ", kind=" + std::string(EventKindName(e.kind)) + ")";
}

}  // namespace

void ValidateEventLog(const EventLog& events) {
  std::vector<const CustomerEvent*> ordered;
  ordered.reserve(events.size());
  for (const CustomerEvent& e : events) {
    if (e.customer_id.empty()) {
      throw DataError("empty customer_id in " + Describe(e));
    }
    if (!std::isfinite(e.value) || e.value < 0.0) {
      throw DataError("negative or non-finite value in " + Describe(e));
    }
    if (!CarriesValue(e.kind) && e.value != 0.0) {
      throw DataError("views and sessions must carry value 0: " + Describe(e));
    }
    if (NeedsProduct(e.kind) && e.product_id.empty()) {
      throw DataError("missing product_id in " + Describe(e));
    }
    ordered.push_back(&e);
  }
  // Orders sort before returns at the same instant.
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const CustomerEvent* a, const CustomerEvent* b) {
                     return std::tie(a->ts, a->kind) < std::tie(b->ts, b->kind);
                   });
  std::set<std::pair<std::string_view, std::string_view>> ordered_products;
  for (const CustomerEvent* e : ordered) {
    if (e->kind == EventKind::kOrderPlaced) {
      ordered_products.emplace(e->customer_id, e->product_id);
    } else if (e->kind == EventKind::kItemReturned &&
               !ordered_products.contains({e->customer_id, e->product_id})) {
      throw DataError("return without a prior order of product '" +
                      e->product_id + "': " + Describe(*e));
    }
  }
}

void SortEvents(EventLog& events) {
  std::stable_sort(events.begin(), events.end(),
                   [](const CustomerEvent& a, const CustomerEvent& b) {
                     return std::tie(a.ts, a.customer_id, a.kind, a.product_id) <
                            std::tie(b.ts, b.customer_id, b.kind, b.product_id);
                   });
}

TimeSplit::TimeSplit(Timestamp feature_start, Timestamp feature_end,
                     Timestamp label_end)
    : feature_start_(feature_start),
      feature_end_(feature_end),
      label_end_(label_end) {
  if (!(feature_start < feature_end && feature_end <= label_end)) {
    throw std::invalid_argument(
        "TimeSplit requires feature_start < feature_end <= label_end");
  }
}

TimeSplit TimeSplit::FromStart(Timestamp feature_start, int64_t feature_days,
                               int64_t label_days) {
  const Timestamp feature_end = feature_start + feature_days * kSecondsPerDay;
  return TimeSplit(feature_start, feature_end,
                   feature_end + label_days * kSecondsPerDay);
}

std::optional<Timestamp> ParseTimestamp(std::string_view text) {
  if (text.empty()) return std::nullopt;
  int64_t epoch = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), epoch);
  if (ec == std::errc() && ptr == text.data() + text.size()) return epoch;

  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  const std::string buf(text);
  int consumed = 0;
  if (std::sscanf(buf.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3) {
    return std::nullopt;
  }
  if (static_cast<size_t>(consumed) < buf.size()) {
    int rest = 0;
    if (std::sscanf(buf.c_str() + consumed, "T%2d:%2d:%2d%n", &h, &mi, &s,
                    &rest) != 3) {
      return std::nullopt;
    }
    consumed += rest;
    if (static_cast<size_t>(consumed) < buf.size() &&
        buf.substr(static_cast<size_t>(consumed)) != "Z") {
      return std::nullopt;
    }
  }
  using namespace std::chrono;
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)},
                           day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  const auto days_since_epoch = sys_days{ymd}.time_since_epoch().count();
  return static_cast<Timestamp>(days_since_epoch) * kSecondsPerDay + h * 3600 +
         mi * 60 + s;
}

std::string FormatTimestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_count = static_cast<int>(
      ts >= 0 ? ts / kSecondsPerDay : (ts - kSecondsPerDay + 1) / kSecondsPerDay);
  const int64_t secs = ts - static_cast<int64_t>(day_count) * kSecondsPerDay;
  const year_month_day ymd{sys_days{days{day_count}}};
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<int>(secs / 3600),
                static_cast<int>(secs / 60 % 60), static_cast<int>(secs % 60));
  return buf;
}

}  // namespace cltv
