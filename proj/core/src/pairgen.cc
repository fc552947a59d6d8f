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

#include "cltv/pairgen.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <stdexcept>
#include <tuple>

#include "artifacts_internal.h"
#include "binary_io.h"
#include "cltv/error.h"

namespace cltv {

CustomerIndex::CustomerIndex(std::vector<std::string> ids) : ids_(std::move(ids)) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  rows_.reserve(ids_.size());
  for (uint32_t i = 0; i < ids_.size(); ++i) rows_.emplace(ids_[i], i);
}

int64_t CustomerIndex::Find(const std::string& id) const {
  auto it = rows_.find(id);
  return it == rows_.end() ? -1 : static_cast<int64_t>(it->second);
}

ViewStreams BuildViewStreams(const EventLog& events, const TimeSplit& split) {
  std::map<std::string_view, std::vector<std::pair<Timestamp, std::string_view>>>
      by_product;
  for (const CustomerEvent& e : events) {
    if (e.kind != EventKind::kProductView || !split.InFeatureWindow(e.ts)) continue;
    by_product[e.product_id].emplace_back(e.ts, e.customer_id);
  }

  std::vector<std::pair<std::string_view, std::vector<std::string_view>>> kept;
  for (auto& [product, views] : by_product) {
    std::sort(views.begin(), views.end());
    std::vector<std::string_view> seq;
    for (const auto& [ts, customer] : views) {
      if (seq.empty() || seq.back() != customer) seq.push_back(customer);
    }
    if (seq.size() >= 2) kept.emplace_back(product, std::move(seq));
  }

  std::vector<std::string> ids;
  for (const auto& [product, seq] : kept) ids.insert(ids.end(), seq.begin(), seq.end());
  ViewStreams out;
  out.index = CustomerIndex(std::move(ids));
  out.streams.reserve(kept.size());
  for (const auto& [product, seq] : kept) {
    ViewStream stream;
    stream.product_id = std::string(product);
    stream.customers.reserve(seq.size());
    for (std::string_view c : seq) {
      stream.customers.push_back(
          static_cast<uint32_t>(out.index.Find(std::string(c))));
    }
    out.streams.push_back(std::move(stream));
  }
  return out;
}

std::vector<TrainingPair> GeneratePairs(std::span<const uint32_t> stream,
                                        int window_length) {
  if (window_length < 3 || window_length % 2 == 0) {
    throw std::invalid_argument("window_length must be odd and >= 3");
  }
  const size_t half = static_cast<size_t>(window_length / 2);
  const size_t n = stream.size();
  std::vector<TrainingPair> pairs;
  pairs.reserve(n * 2 * half);
  for (size_t i = 0; i < n; ++i) {
    const size_t lo = i >= half ? i - half : 0;
    const size_t hi = std::min(n - 1, i + half);
    for (size_t j = lo; j <= hi; ++j) {
      if (j == i || stream[j] == stream[i]) continue;
      pairs.push_back({stream[i], stream[j]});
    }
  }
  return pairs;
}

std::vector<TrainingPair> GenerateAllPairs(const ViewStreams& streams,
                                           int window_length) {
  std::vector<TrainingPair> all;
  for (const ViewStream& s : streams.streams) {
    const auto pairs = GeneratePairs(s.customers, window_length);
    all.insert(all.end(), pairs.begin(), pairs.end());
  }
  return all;
}

NegativeTable::NegativeTable(std::span<const uint64_t> counts, double exponent)
    : exponent_(exponent) {
  std::vector<double> weights;
  for (uint32_t row = 0; row < counts.size(); ++row) {
    if (counts[row] == 0) continue;
    rows_.push_back(row);
    weights.push_back(std::pow(static_cast<double>(counts[row]), exponent));
  }
  if (rows_.empty()) throw std::invalid_argument("negative table needs counts");
  double total = 0.0;
  for (double w : weights) total += w;
  cdf_.resize(weights.size());
  prob_.resize(weights.size());
  double running = 0.0;
  for (size_t i = 0; i < weights.size(); ++i) {
    running += weights[i];
    cdf_[i] = running / total;
    prob_[i] = weights[i] / total;
  }
  cdf_.back() = 1.0;
}

uint32_t NegativeTable::Draw(Rng& rng) const {
  const double u = UniformUnit(rng);
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const size_t i = std::min(static_cast<size_t>(it - cdf_.begin()), cdf_.size() - 1);
  return rows_[i];
}

void NegativeTable::Sample(int k, uint32_t exclude, Rng& rng,
                           std::vector<uint32_t>& out) const {
  out.clear();
  for (int i = 0; i < k; ++i) {
    uint32_t draw = Draw(rng);
    for (int retry = 0; retry < kMaxRedraws && draw == exclude; ++retry) {
      draw = Draw(rng);
    }
    out.push_back(draw);
  }
}

std::vector<uint32_t> NegativeTable::Sample(int k, uint32_t exclude, Rng& rng) const {
  std::vector<uint32_t> out;
  Sample(k, exclude, rng, out);
  return out;
}

double NegativeTable::Probability(uint32_t row) const {
  const auto it = std::lower_bound(rows_.begin(), rows_.end(), row);
  if (it == rows_.end() || *it != row) return 0.0;
  return prob_[static_cast<size_t>(it - rows_.begin())];
}

NegativeTable BuildNegativeTable(const ViewStreams& streams, double exponent) {
  if (streams.streams.empty()) {
    throw std::invalid_argument("cannot build a negative table without streams");
  }
  std::vector<uint64_t> counts(streams.index.size(), 0);
  for (const ViewStream& s : streams.streams) {
    for (uint32_t c : s.customers) ++counts[c];
  }
  return NegativeTable(counts, exponent);
}

void WritePairFile(const std::filesystem::path& path,
                   std::span<const TrainingPair> pairs) {
  internal::AtomicWrite(path, [&](std::ostream& out) {
    internal::BinaryWriter w(out);
    w.Magic("CLTVPAIR");
    w.U32(kPairFileVersion);
    w.U64(pairs.size());
    for (const TrainingPair& p : pairs) {
      w.U64(p.in);
      w.U64(p.out);
    }
  });
}

std::vector<TrainingPair> ReadPairFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open pair file " + path.string());
  internal::BinaryReader r(in, "pair file " + path.string());
  r.ExpectMagic("CLTVPAIR");
  if (r.U32() != kPairFileVersion) r.Fail("unsupported version");
  const uint64_t n = r.U64();
  std::vector<TrainingPair> pairs;
  pairs.reserve(n);
  for (uint64_t i = 0; i < n; ++i) {
    const uint64_t a = r.U64();
    const uint64_t b = r.U64();
    if (a > UINT32_MAX || b > UINT32_MAX) r.Fail("row index out of range");
    pairs.push_back({static_cast<uint32_t>(a), static_cast<uint32_t>(b)});
  }
  r.ExpectEnd();
  return pairs;
}

}  // namespace cltv
