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

#ifndef CLTV_PAIRGEN_H_
#define CLTV_PAIRGEN_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "cltv/events.h"
#include "cltv/rng.h"

namespace cltv {

// Dense row numbering for customer ids, ordered by id.
class CustomerIndex {
 public:
  CustomerIndex() = default;
  // Ids are sorted and deduplicated.
  explicit CustomerIndex(std::vector<std::string> ids);

  size_t size() const { return ids_.size(); }
  const std::string& id(uint32_t row) const { return ids_[row]; }
  const std::vector<std::string>& ids() const { return ids_; }
  // Returns -1 when absent.
  int64_t Find(const std::string& id) const;
  bool Contains(const std::string& id) const { return Find(id) >= 0; }

  bool operator==(const CustomerIndex& other) const { return ids_ == other.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, uint32_t> rows_;
};

struct ViewStream {
  std::string product_id;
  // Rows into the owning CustomerIndex, ordered by (view ts, customer id),
  // with consecutive repeats collapsed.
  std::vector<uint32_t> customers;
};

struct ViewStreams {
  CustomerIndex index;
  // Ordered by product_id; only streams with at least two entries.
  std::vector<ViewStream> streams;
};

struct TrainingPair {
  uint32_t in = 0;
  uint32_t out = 0;
  bool operator==(const TrainingPair&) const = default;
};

// Streams from product views inside the feature window. The index covers
// exactly the customers appearing in a retained stream.
ViewStreams BuildViewStreams(const EventLog& events, const TimeSplit& split);

// Sliding window of odd length >= 3 centred on each position; the centre is
// `in` and every other customer in the window is `out`. Windows truncate at the
// sequence ends and self pairs are skipped. Throws std::invalid_argument for a
// bad window.
std::vector<TrainingPair> GeneratePairs(std::span<const uint32_t> stream,
                                        int window_length);

// All streams concatenated in product order.
std::vector<TrainingPair> GenerateAllPairs(const ViewStreams& streams,
                                           int window_length);

// Inverse-CDF sampler over count^exponent.
class NegativeTable {
 public:
  // `counts[row]` is the number of stream appearances; rows with zero count are
  // not sampleable. Throws std::invalid_argument if every count is zero.
  NegativeTable(std::span<const uint64_t> counts, double exponent);

  static constexpr int kMaxRedraws = 8;

  // One draw, no exclusion.
  uint32_t Draw(Rng& rng) const;
  // k draws; a draw equal to `exclude` is redrawn up to kMaxRedraws times and
  // then accepted as is.
  void Sample(int k, uint32_t exclude, Rng& rng, std::vector<uint32_t>& out) const;
  std::vector<uint32_t> Sample(int k, uint32_t exclude, Rng& rng) const;

  double Probability(uint32_t row) const;
  const std::vector<uint32_t>& rows() const { return rows_; }
  const std::vector<double>& cdf() const { return cdf_; }
  double exponent() const { return exponent_; }

 private:
  std::vector<uint32_t> rows_;
  std::vector<double> cdf_;
  std::vector<double> prob_;
  double exponent_;
};

// Throws std::invalid_argument when there are no streams.
NegativeTable BuildNegativeTable(const ViewStreams& streams, double exponent = 0.75);

// Pair spill file: magic "CLTVPAIR", u32 version, u64 count, then count
// little-endian (u64 in, u64 out) records.
inline constexpr uint32_t kPairFileVersion = 1;
void WritePairFile(const std::filesystem::path& path,
                   std::span<const TrainingPair> pairs);
std::vector<TrainingPair> ReadPairFile(const std::filesystem::path& path);

}  // namespace cltv

#endif  // CLTV_PAIRGEN_H_
