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

#ifndef CLTV_METRICS_H_
#define CLTV_METRICS_H_

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cltv {

// Mann-Whitney AUC from average ranks, ties counted as half. Throws
// std::invalid_argument on a length mismatch or when one class is absent.
double Auc(std::span<const double> scores, const std::vector<bool>& labels);

// Pearson correlation of average ranks. Throws std::invalid_argument for
// n < 2, mismatched lengths, or a constant argument.
double Spearman(std::span<const double> x, std::span<const double> y);

// Throws std::invalid_argument on empty or mismatched input.
double Rmse(std::span<const double> predicted, std::span<const double> actual);

struct CalibrationBin {
  // Score interval covered by the bin; the bins tile [0, 1].
  double lower = 0.0;
  double upper = 1.0;
  double mean_predicted = 0.0;
  double empirical_rate = 0.0;
  size_t count = 0;

  bool operator==(const CalibrationBin&) const = default;
};

// Equal-mass bins over scores in [0, 1] sorted ascending. Bin sizes differ by
// at most one; scores are assumed to lie in [0, 1].
std::vector<CalibrationBin> CalibrationCurve(std::span<const double> scores,
                                             const std::vector<bool>& labels,
                                             size_t n_bins = 10);

// Count-weighted mean |mean_predicted - empirical_rate|.
double ExpectedCalibrationError(std::span<const CalibrationBin> bins);
double ExpectedCalibrationError(std::span<const double> scores,
                                const std::vector<bool>& labels, size_t n_bins = 10);

struct MetricReport {
  size_t n = 0;
  double auc = 0.0;
  double spearman = 0.0;
  double rmse = 0.0;
  std::vector<CalibrationBin> calibration_bins;
  // Named scalars beyond the core set, e.g. baseline and aggregate figures.
  std::map<std::string, double> extra;

  std::string ToJson() const;
  static MetricReport FromJson(const std::string& text);
  std::string FormatTable() const;
};

// "bin,lower,upper,mean_predicted,empirical_rate,count"
void WriteCalibrationCsv(std::span<const CalibrationBin> bins, std::ostream& out);

}  // namespace cltv

#endif  // CLTV_METRICS_H_
