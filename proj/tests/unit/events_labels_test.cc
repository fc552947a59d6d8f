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

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include "cltv/error.h"
#include "cltv/event_io.h"
#include "cltv/events.h"
#include "cltv/labels.h"
#include "cltv/rng.h"
#include "oracles.h"
#include "test_helpers.h"

namespace cltv {
namespace {

using test::Day;
using test::Order;
using test::Return;
using test::Session;
using test::View;

const TimeSplit kSplit = TimeSplit::FromStart(test::kT0);

const LabelRecord& Find(const LabelSet& set, const std::string& id) {
  for (const LabelRecord& r : set.records) {
    if (r.customer_id == id) return r;
  }
  throw std::runtime_error("no record for " + id);
}

TEST(TimeSplit, WindowsAreHalfOpenAndDisjoint) {
  EXPECT_EQ(kSplit.feature_end() - kSplit.feature_start(), 365 * kSecondsPerDay);
  EXPECT_EQ(kSplit.label_end() - kSplit.feature_end(), 365 * kSecondsPerDay);
  EXPECT_TRUE(kSplit.InFeatureWindow(kSplit.feature_start()));
  EXPECT_FALSE(kSplit.InFeatureWindow(kSplit.feature_end()));
  EXPECT_TRUE(kSplit.InLabelWindow(kSplit.feature_end()));
  EXPECT_FALSE(kSplit.InLabelWindow(kSplit.label_end()));
}

TEST(TimeSplit, RejectsBadOrdering) {
  EXPECT_THROW(TimeSplit(10, 10, 20), std::invalid_argument);
  EXPECT_THROW(TimeSplit(10, 30, 20), std::invalid_argument);
  EXPECT_NO_THROW(TimeSplit(10, 20, 20));
}

TEST(Timestamps, ParseIsoAndEpoch) {
  EXPECT_EQ(ParseTimestamp("2015-01-01"), test::kT0);
  EXPECT_EQ(ParseTimestamp("2015-01-01T00:00:10Z"), test::kT0 + 10);
  EXPECT_EQ(ParseTimestamp("1420070400"), test::kT0);
  EXPECT_FALSE(ParseTimestamp("yesterday").has_value());
  EXPECT_EQ(ParseTimestamp(FormatTimestamp(test::kT0 + 12345)), test::kT0 + 12345);
}

TEST(Validation, RejectsSchemaViolations) {
  EXPECT_THROW(ValidateEventLog({Return("a", Day(1), "p", 5)}), DataError);
  EXPECT_THROW(ValidateEventLog({Order("a", Day(2), "p", 5), Return("a", Day(1), "p", 5)}),
               DataError);
  EXPECT_THROW(ValidateEventLog({Order("a", Day(1), "p", -1)}), DataError);
  CustomerEvent bad_view = View("a", Day(1), "p");
  bad_view.value = 3;
  EXPECT_THROW(ValidateEventLog({bad_view}), DataError);
  EXPECT_THROW(ValidateEventLog({View("a", Day(1), "")}), DataError);
  EXPECT_NO_THROW(ValidateEventLog({Order("a", Day(1), "p", 5), Return("a", Day(3), "p", 5),
                                    Session("a", Day(2))}));
}

TEST(Labels, OrdersMinusReturns) {
  const EventLog log = {Session("a", Day(10)), Order("a", Day(400), "p", 100),
                        Return("a", Day(410), "p", 30)};
  const LabelSet labels = DeriveLabels(log, kSplit);
  const LabelRecord& a = Find(labels, "a");
  EXPECT_DOUBLE_EQ(a.net_spend, 70.0);
  EXPECT_FALSE(a.churned);
}

TEST(Labels, FeatureWindowOnlyCustomerChurns) {
  const EventLog log = {Order("a", Day(10), "p", 50), View("a", Day(20), "q")};
  const LabelRecord& a = Find(DeriveLabels(log, kSplit), "a");
  EXPECT_EQ(a.net_spend, 0.0);
  EXPECT_TRUE(a.churned);
}

TEST(Labels, TiedPercentilesShareAverageRank) {
  const EventLog log = {Session("a", Day(1)),          Session("b", Day(1)),
                        Session("c", Day(1)),          Order("b", Day(370), "p", 50),
                        Order("c", Day(380), "p", 50)};
  const LabelSet labels = DeriveLabels(log, kSplit);
  // Average ranks 1, 2.5, 2.5 centred on their cells: 1/6, 2/3, 2/3.
  EXPECT_NEAR(Find(labels, "a").percentile, 1.0 / 6, 1e-15);
  EXPECT_NEAR(Find(labels, "b").percentile, 2.0 / 3, 1e-15);
  EXPECT_NEAR(Find(labels, "c").percentile, 2.0 / 3, 1e-15);

  std::vector<double> spend;
  for (const LabelRecord& r : labels.records) spend.push_back(r.net_spend);
  const std::vector<double> ranks = testing::CountingRanks(spend);
  for (size_t i = 0; i < ranks.size(); ++i) {
    EXPECT_NEAR(labels.records[i].percentile, (ranks[i] - 0.5) / 3, 1e-15);
  }
}

TEST(Labels, ReturnsExceedingOrdersClampToZero) {
  const EventLog log = {Order("a", Day(100), "p", 80), Return("a", Day(400), "p", 80),
                        Order("b", Day(100), "p", 20)};
  const LabelSet labels = DeriveLabels(log, kSplit);
  EXPECT_EQ(Find(labels, "a").net_spend, 0.0);
  EXPECT_TRUE(Find(labels, "a").churned);
  EXPECT_EQ(labels.clamped_customers, 1u);
}

TEST(Labels, EmptyCohortIsAnError) {
  const EventLog log = {Order("a", Day(400), "p", 10)};
  EXPECT_THROW(DeriveLabels(log, kSplit), DataError);
  EXPECT_THROW(DeriveLabels({}, kSplit), DataError);
}

// Random log with every customer active in the feature window.
EventLog RandomLog(uint64_t seed, int customers) {
  Rng rng(seed);
  EventLog log;
  for (int c = 0; c < customers; ++c) {
    const std::string id = "c" + std::to_string(c);
    log.push_back(Session(id, Day(UniformUnit(rng) * 365)));
    const int orders = static_cast<int>(UniformIndex(rng, 5));
    for (int o = 0; o < orders; ++o) {
      const std::string p = "p" + std::to_string(UniformIndex(rng, 20));
      const double day = UniformUnit(rng) * 700;
      log.push_back(Order(id, Day(day), p, std::round(UniformUnit(rng) * 100)));
      if (UniformUnit(rng) < 0.4) {
        log.push_back(Return(id, Day(day + 5), p, std::round(UniformUnit(rng) * 120)));
      }
    }
  }
  return log;
}

TEST(Labels, PermutationInvariant) {
  EventLog log = RandomLog(7, 200);
  const LabelSet before = DeriveLabels(log, kSplit);
  Rng rng(8);
  Shuffle(log.begin(), log.end(), rng);
  const LabelSet after = DeriveLabels(log, kSplit);
  EXPECT_EQ(before.records, after.records);
  EXPECT_EQ(before.clamped_customers, after.clamped_customers);
}

TEST(Labels, SumMatchesPerCustomerClampedTotals) {
  const EventLog log = RandomLog(9, 300);
  std::map<std::string, double> net;
  for (const CustomerEvent& e : log) {
    if (!kSplit.InLabelWindow(e.ts)) continue;
    if (e.kind == EventKind::kOrderPlaced) net[e.customer_id] += e.value;
    if (e.kind == EventKind::kItemReturned) net[e.customer_id] -= e.value;
  }
  double expected = 0;
  for (const auto& [id, v] : net) expected += std::max(0.0, v);
  double total = 0;
  for (const LabelRecord& r : DeriveLabels(log, kSplit).records) total += r.net_spend;
  EXPECT_NEAR(total, expected, 1e-9);
}

TEST(Labels, PercentileMonotoneInSpendAndChurnImpliesZero) {
  const LabelSet labels = DeriveLabels(RandomLog(10, 300), kSplit);
  for (const LabelRecord& a : labels.records) {
    EXPECT_GT(a.percentile, 0.0);
    EXPECT_LT(a.percentile, 1.0);
    if (a.churned) EXPECT_EQ(a.net_spend, 0.0);
    for (const LabelRecord& b : labels.records) {
      if (a.net_spend > b.net_spend) EXPECT_GT(a.percentile, b.percentile);
    }
  }
}

TEST(EventIo, NdjsonAndCsvRoundTrip) {
  EventLog log = RandomLog(11, 20);
  log[0].attrs = {{"country", "uk"}, {"age", "31"}};
  log.push_back(View("x", Day(3), "p1"));
  log.back().attrs["is_new_collection"] = "1";
  SortEvents(log);
  for (int csv = 0; csv < 2; ++csv) {
    std::stringstream buf;
    csv ? WriteEventsCsv(log, buf) : WriteEventsNdjson(log, buf);
    const EventLog back = csv ? ReadEventsCsv(buf) : ReadEventsNdjson(buf);
    EXPECT_EQ(back, log);
  }
}

TEST(EventIo, MalformedLineNamesTheLine) {
  std::stringstream in(
      "{\"customer_id\":\"a\",\"ts\":1,\"kind\":\"session_start\"}\n{\"customer_id\":\"a\"\n");
  try {
    ReadEventsNdjson(in);
    FAIL() << "expected DataError";
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos) << e.what();
  }
  std::stringstream unknown_kind(
      "{\"customer_id\":\"a\",\"ts\":1,\"kind\":\"teleport\"}\n");
  EXPECT_THROW(ReadEventsNdjson(unknown_kind), DataError);
}

}  // namespace
}  // namespace cltv
