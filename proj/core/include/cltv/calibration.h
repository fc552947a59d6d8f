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

#ifndef CLTV_CALIBRATION_H_
#define CLTV_CALIBRATION_H_

#include <span>
#include <string>
#include <vector>

#include "cltv/forest.h"

namespace cltv {

// calibrated(s) = sigmoid(a * x + b), where x is the raw score or, with
// logit_input, its log-odds. A default-constructed model is the identity.
struct PlattModel {
  double a = 1.0;
  double b = 0.0;
  bool logit_input = true;
  int iterations = 0;
  bool converged = false;

  // Strictly inside (0, 1).
  double Apply(double score) const;
  bool operator==(const PlattModel&) const = default;
};

struct PlattOptions {
  bool logit_input = false;
  double gradient_tolerance = 1e-8;
  int max_iterations = 100;
};

// Raw scores are clamped to [kScoreEpsilon, 1 - kScoreEpsilon] before the logit.
inline constexpr double kScoreEpsilon = 1e-6;

// Maximum-likelihood (a, b) by Newton's method with step halving, started at
// a = b = 0. Throws std::invalid_argument with fewer than 10 samples, a length
// mismatch, or a single class.
PlattModel FitPlatt(std::span<const double> scores, const std::vector<bool>& labels,
                    const PlattOptions& options = {});

struct ValueMapOptions {
  int max_depth = 6;
  int min_samples_leaf = 50;
};

// Piecewise-constant map from predicted percentile to monetary value.
class PercentileValueMap {
 public:
  PercentileValueMap() = default;
  explicit PercentileValueMap(DecisionTree tree) : tree_(std::move(tree)) {}

  double Apply(double percentile) const;
  const DecisionTree& tree() const { return tree_; }
  // Leaf values in ascending order of their percentile interval.
  std::vector<double> LeafValuesInOrder() const;
  // True when leaf values never decrease as the percentile grows.
  bool IsMonotone() const;
  bool operator==(const PercentileValueMap&) const = default;

 private:
  DecisionTree tree_;
};

// Variance-reduction tree on the single input. Throws std::invalid_argument with
// fewer than 2*min_samples_leaf rows, mismatched lengths, or negative values.
PercentileValueMap FitPercentileValueMap(std::span<const double> predicted_percentiles,
                                         std::span<const double> actual_values,
                                         const ValueMapOptions& options = {});

// Reference mapping without a learned tree: the empirical quantile of the
// training values at the predicted percentile.
class QuantileValueMap {
 public:
  explicit QuantileValueMap(std::vector<double> training_values);
  double Apply(double percentile) const;

 private:
  std::vector<double> sorted_;
};

struct CalibrationModel {
  PlattModel platt;
  PercentileValueMap value_map;
  bool operator==(const CalibrationModel&) const = default;
};

struct PredictionRecord {
  std::string customer_id;
  double churn_prob_raw = 0.0;
  double churn_prob_calibrated = 0.0;
  double percentile = 0.0;
  double cltv_value = 0.0;
};

PredictionRecord ApplyCalibration(const PlattModel& platt, const PercentileValueMap& map,
                                  double raw_churn_score, double raw_percentile);

}  // namespace cltv

#endif  // CLTV_CALIBRATION_H_
