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

// Independent reference implementations used to check the library.

#ifndef CLTV_TESTS_SUPPORT_ORACLES_H_
#define CLTV_TESTS_SUPPORT_ORACLES_H_

#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

namespace cltv::testing {

// Every (centre, neighbour) inside the window, by direct index arithmetic.
inline std::vector<std::pair<uint32_t, uint32_t>> BruteForcePairs(
    const std::vector<uint32_t>& stream, int window) {
  std::vector<std::pair<uint32_t, uint32_t>> out;
  const int half = (window - 1) / 2;
  const int n = static_cast<int>(stream.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (j == i || std::abs(i - j) > half) continue;
      if (stream[static_cast<size_t>(i)] == stream[static_cast<size_t>(j)]) continue;
      out.emplace_back(stream[static_cast<size_t>(i)], stream[static_cast<size_t>(j)]);
    }
  }
  return out;
}

// O(n^2) concordance count.
inline double PairwiseAuc(const std::vector<double>& s, const std::vector<bool>& y) {
  double concordant = 0, pairs = 0;
  for (size_t i = 0; i < s.size(); ++i) {
    if (!y[i]) continue;
    for (size_t j = 0; j < s.size(); ++j) {
      if (y[j]) continue;
      pairs += 1;
      if (s[i] > s[j]) {
        concordant += 1;
      } else if (s[i] == s[j]) {
        concordant += 0.5;
      }
    }
  }
  return concordant / pairs;
}

// Rank of each value as (#smaller) + (#equal + 1) / 2, counted directly.
inline std::vector<double> CountingRanks(const std::vector<double>& v) {
  std::vector<double> r(v.size());
  for (size_t i = 0; i < v.size(); ++i) {
    double less = 0, equal = 0;
    for (double w : v) {
      less += w < v[i];
      equal += w == v[i];
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

inline double NaivePearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double num = 0, da = 0, db = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - ma) * (b[i] - mb);
    da += (a[i] - ma) * (a[i] - ma);
    db += (b[i] - mb) * (b[i] - mb);
  }
  return num / std::sqrt(da * db);
}

inline double NaiveSpearman(const std::vector<double>& x, const std::vector<double>& y) {
  return NaivePearson(CountingRanks(x), CountingRanks(y));
}

inline double NaiveRmse(const std::vector<double>& p, const std::vector<double>& a) {
  double s = 0;
  for (size_t i = 0; i < p.size(); ++i) s += (p[i] - a[i]) * (p[i] - a[i]);
  return std::sqrt(s / static_cast<double>(p.size()));
}

// Central difference of f at x along every coordinate.
inline std::vector<double> CentralDifference(const std::function<double()>& f,
                                             std::vector<double*> coords, double h = 1e-6) {
  std::vector<double> g;
  for (double* x : coords) {
    const double saved = *x;
    *x = saved + h;
    const double up = f();
    *x = saved - h;
    const double down = f();
    *x = saved;
    g.push_back((up - down) / (2 * h));
  }
  return g;
}

}  // namespace cltv::testing

#endif  // CLTV_TESTS_SUPPORT_ORACLES_H_
