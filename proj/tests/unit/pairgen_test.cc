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
#include <tuple>

#include "cltv/pairgen.h"
#include "cltv/rng.h"
#include "oracles.h"
#include "test_helpers.h"

namespace cltv {
namespace {

using test::Day;
using test::View;

const TimeSplit kSplit = TimeSplit::FromStart(test::kT0);

std::vector<std::string> StreamIds(const ViewStreams& s, size_t i) {
  std::vector<std::string> ids;
  for (uint32_t r : s.streams[i].customers) ids.push_back(s.index.id(r));
  return ids;
}

TEST(ViewStreams, OrderedByTimeWithRepeatsKept) {
  const EventLog log = {View("C1", Day(3), "p"), View("C2", Day(2), "p"),
                        View("C1", Day(1), "p")};
  const ViewStreams s = BuildViewStreams(log, kSplit);
  ASSERT_EQ(s.streams.size(), 1u);
  EXPECT_EQ(StreamIds(s, 0), (std::vector<std::string>{"C1", "C2", "C1"}));
}

TEST(ViewStreams, ConsecutiveRepeatsCollapseAndShortStreamsDrop) {
  const EventLog log = {View("C1", Day(1), "p"), View("C1", Day(2), "p"),
                        View("C2", Day(1), "q"), View("C3", Day(2), "q")};
  const ViewStreams s = BuildViewStreams(log, kSplit);
  ASSERT_EQ(s.streams.size(), 1u);
  EXPECT_EQ(s.streams[0].product_id, "q");
  EXPECT_FALSE(s.index.Contains("C1"));
}

TEST(ViewStreams, IgnoresViewsOutsideTheFeatureWindow) {
  const EventLog log = {View("C1", Day(1), "p"), View("C2", Day(2), "p"),
                        View("C3", Day(400), "p"), View("C4", Day(-3), "p")};
  const ViewStreams s = BuildViewStreams(log, kSplit);
  ASSERT_EQ(s.streams.size(), 1u);
  EXPECT_EQ(StreamIds(s, 0), (std::vector<std::string>{"C1", "C2"}));
}

TEST(ViewStreams, RetainedLengthMatchesCountingOracle) {
  Rng rng(1);
  EventLog log;
  for (int i = 0; i < 100; ++i) {
    log.push_back(View("c" + std::to_string(UniformIndex(rng, 6)),
                       Day(static_cast<double>(UniformIndex(rng, 50))),
                       "p" + std::to_string(UniformIndex(rng, 10))));
  }
  // Oracle: per product, sort, count collapsed repeats, drop short streams.
  std::map<std::string, std::vector<std::pair<Timestamp, std::string>>> by_product;
  for (const CustomerEvent& e : log) by_product[e.product_id].emplace_back(e.ts, e.customer_id);
  size_t collapsed = 0, dropped = 0;
  for (auto& [p, views] : by_product) {
    std::sort(views.begin(), views.end());
    size_t kept = 1;
    for (size_t i = 1; i < views.size(); ++i) {
      if (views[i].second == views[i - 1].second) {
        ++collapsed;
      } else {
        ++kept;
      }
    }
    if (kept < 2) dropped += kept;
  }
  size_t total = 0;
  for (const ViewStream& s : BuildViewStreams(log, kSplit).streams) total += s.customers.size();
  EXPECT_EQ(total, log.size() - collapsed - dropped);
}

TEST(GeneratePairs, WindowThreeOverThreeCustomers) {
  const std::vector<uint32_t> stream = {1, 2, 3};
  const std::vector<TrainingPair> expected = {{1, 2}, {2, 1}, {2, 3}, {3, 2}};
  EXPECT_EQ(GeneratePairs(stream, 3), expected);
}

TEST(GeneratePairs, RepeatedNeighbourKeepsDuplicatePairs) {
  const std::vector<uint32_t> stream = {1, 2, 1};
  std::vector<TrainingPair> centre;
  for (const TrainingPair& p : GeneratePairs(stream, 3)) {
    if (p.in == 2) centre.push_back(p);
  }
  EXPECT_EQ(centre, (std::vector<TrainingPair>{{2, 1}, {2, 1}}));
}

TEST(GeneratePairs, RejectsBadWindows) {
  const std::vector<uint32_t> stream = {1, 2};
  EXPECT_THROW(GeneratePairs(stream, 1), std::invalid_argument);
  EXPECT_THROW(GeneratePairs(stream, 4), std::invalid_argument);
  EXPECT_THROW(GeneratePairs(stream, 0), std::invalid_argument);
}

TEST(GeneratePairs, MatchesBruteForceAndIsSymmetric) {
  Rng rng(2);
  for (int t = 0; t < 300; ++t) {
    std::vector<uint32_t> stream(UniformIndex(rng, 40));
    for (uint32_t& c : stream) c = static_cast<uint32_t>(UniformIndex(rng, 8));
    const int window = 3 + 2 * static_cast<int>(UniformIndex(rng, 5));
    std::map<std::pair<uint32_t, uint32_t>, int> counts;
    for (const TrainingPair& p : GeneratePairs(stream, window)) {
      ASSERT_NE(p.in, p.out);
      ++counts[{p.in, p.out}];
    }
    std::map<std::pair<uint32_t, uint32_t>, int> oracle;
    for (const auto& p : testing::BruteForcePairs(stream, window)) ++oracle[p];
    EXPECT_EQ(counts, oracle);
    for (const auto& [p, n] : counts) {
      const auto it = counts.find({p.second, p.first});
      ASSERT_NE(it, counts.end());
      EXPECT_EQ(it->second, n);
    }
  }
}

TEST(NegativeTable, EqualCountsAreEquallyLikely) {
  const std::vector<uint64_t> counts = {1, 1};
  const NegativeTable table(counts, 0.75);
  EXPECT_DOUBLE_EQ(table.Probability(0), 0.5);
  EXPECT_DOUBLE_EQ(table.Probability(1), 0.5);
}

TEST(NegativeTable, SixteenToOne) {
  const std::vector<uint64_t> counts = {16, 1};
  const NegativeTable table(counts, 0.75);
  EXPECT_EQ(table.Probability(0), 8.0 / 9.0);
  EXPECT_EQ(table.Probability(1), 1.0 / 9.0);
}

TEST(NegativeTable, ZeroExponentIsUniformOverAppearingRows) {
  const std::vector<uint64_t> counts = {5, 0, 100, 1};
  const NegativeTable table(counts, 0.0);
  EXPECT_EQ(table.Probability(1), 0.0);
  for (uint32_t r : {0u, 2u, 3u}) EXPECT_NEAR(table.Probability(r), 1.0 / 3.0, 1e-15);
}

TEST(NegativeTable, CdfStrictlyIncreasingToOne) {
  Rng rng(3);
  std::vector<uint64_t> counts(200);
  for (uint64_t& c : counts) c = UniformIndex(rng, 50);
  const NegativeTable table(counts, 0.75);
  const auto& cdf = table.cdf();
  for (size_t i = 1; i < cdf.size(); ++i) EXPECT_LT(cdf[i - 1], cdf[i]);
  EXPECT_NEAR(cdf.back(), 1.0, 1e-12);
}

TEST(NegativeTable, EmptyCountsRejected) {
  const std::vector<uint64_t> counts = {0, 0};
  EXPECT_THROW(NegativeTable(counts, 0.75), std::invalid_argument);
}

TEST(NegativeTable, SingleRowExclusionFallsThrough) {
  const std::vector<uint64_t> counts = {0, 4};
  const NegativeTable table(counts, 0.75);
  Rng rng(4);
  EXPECT_EQ(table.Sample(3, 1, rng), (std::vector<uint32_t>{1, 1, 1}));
}

TEST(NegativeTable, ExclusionAvoidsTargetWhenPossible) {
  const std::vector<uint64_t> counts = {1, 1};
  const NegativeTable table(counts, 0.75);
  Rng rng(5);
  int hits = 0;
  for (int i = 0; i < 2000; ++i) {
    for (uint32_t r : table.Sample(5, 0, rng)) hits += r == 0;
  }
  // Row 0 survives only after nine straight hits: expected 10000 / 512.
  EXPECT_LT(hits, 60);
}

TEST(NegativeTable, SameSeedSameDraws) {
  const std::vector<uint64_t> counts = {3, 9, 1, 4};
  const NegativeTable table(counts, 0.75);
  Rng a(6), b(6);
  EXPECT_EQ(table.Sample(100, 2, a), table.Sample(100, 2, b));
}

TEST(PairFile, RoundTrip) {
  const auto dir = test::TempDir("pairs");
  const std::vector<TrainingPair> pairs = {{0, 1}, {5, 2}, {4294967295u, 7}};
  WritePairFile(dir / "p.bin", pairs);
  EXPECT_EQ(ReadPairFile(dir / "p.bin"), pairs);
}

}  // namespace
}  // namespace cltv
