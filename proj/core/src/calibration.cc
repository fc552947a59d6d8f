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

#include "cltv/calibration.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cltv {

namespace {

double Logit(double p) {
  p = std::clamp(p, kScoreEpsilon, 1.0 - kScoreEpsilon);
  return std::log(p / (1.0 - p));
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double NegLogLikelihood(std::span<const double> x, const std::vector<bool>& y, double a,
                        double b) {
  double total = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double z = a * x[i] + b;
    total += y[i] ? Softplus(-z) : Softplus(z);
  }
  return total / static_cast<double>(x.size());
}

}  // namespace

double PlattModel::Apply(double score) const {
  const double x = logit_input ? Logit(score) : score;
  constexpr double kEdge = 1e-15;
  return std::clamp(Sigmoid(a * x + b), kEdge, 1.0 - kEdge);
}

PlattModel FitPlatt(std::span<const double> scores, const std::vector<bool>& labels,
                    const PlattOptions& options) {
  if (scores.size() != labels.size()) throw std::invalid_argument("Platt: length mismatch");
  if (scores.size() < 10) throw std::invalid_argument("Platt: need at least 10 samples");
  const auto positives = std::count(labels.begin(), labels.end(), true);
  if (positives == 0 || static_cast<size_t>(positives) == labels.size()) {
    throw std::invalid_argument("Platt: calibration needs both classes");
  }
  std::vector<double> x(scores.begin(), scores.end());
  if (options.logit_input) {
    for (double& v : x) v = Logit(v);
  }
  const double n = static_cast<double>(x.size());

  PlattModel model;
  model.logit_input = options.logit_input;
  model.a = 0.0;
  model.b = 0.0;
  double loss = NegLogLikelihood(x, labels, model.a, model.b);
  for (int it = 0; it < options.max_iterations; ++it) {
    double ga = 0, gb = 0, haa = 0, hab = 0, hbb = 0;
    for (size_t i = 0; i < x.size(); ++i) {
      const double p = Sigmoid(model.a * x[i] + model.b);
      const double r = p - (labels[i] ? 1.0 : 0.0);
      const double w = p * (1.0 - p);
      ga += r * x[i];
      gb += r;
      haa += w * x[i] * x[i];
      hab += w * x[i];
      hbb += w;
    }
    ga /= n;
    gb /= n;
    haa /= n;
    hab /= n;
    hbb /= n;
    model.iterations = it;
    if (std::hypot(ga, gb) < options.gradient_tolerance) {
      model.converged = true;
      break;
    }
    const double det = haa * hbb - hab * hab;
    double da, db;
    if (det > 1e-300 && std::isfinite(det)) {
      da = (hbb * ga - hab * gb) / det;
      db = (haa * gb - hab * ga) / det;
    } else {
      da = ga;
      db = gb;
    }
    double step = 1.0;
    bool improved = false;
    for (int h = 0; h < 40; ++h) {
      const double a = model.a - step * da, b = model.b - step * db;
      const double candidate = NegLogLikelihood(x, labels, a, b);
      if (std::isfinite(candidate) && candidate <= loss) {
        model.a = a;
        model.b = b;
        improved = candidate < loss;
        loss = candidate;
        break;
      }
      step /= 2;
    }
    if (!improved) {
      model.iterations = it + 1;
      break;
    }
    model.iterations = it + 1;
  }
  return model;
}

double PercentileValueMap::Apply(double percentile) const {
  const double p = std::clamp(percentile, 0.0, 1.0);
  return tree_.Predict(std::span<const double>(&p, 1));
}

std::vector<double> PercentileValueMap::LeafValuesInOrder() const {
  std::vector<double> out;
  const auto& nodes = tree_.nodes();
  if (nodes.empty()) return out;
  // In-order traversal: left children hold the lower percentiles.
  std::vector<int32_t> stack;
  int32_t i = 0;
  while (i >= 0 || !stack.empty()) {
    while (i >= 0) {
      stack.push_back(i);
      i = nodes[static_cast<size_t>(i)].left;
    }
    const int32_t top = stack.back();
    stack.pop_back();
    if (nodes[static_cast<size_t>(top)].is_leaf()) {
      out.push_back(nodes[static_cast<size_t>(top)].value);
    }
    i = nodes[static_cast<size_t>(top)].right;
  }
  return out;
}

bool PercentileValueMap::IsMonotone() const {
  const std::vector<double> leaves = LeafValuesInOrder();
  return std::is_sorted(leaves.begin(), leaves.end());
}

PercentileValueMap FitPercentileValueMap(std::span<const double> predicted_percentiles,
                                         std::span<const double> actual_values,
                                         const ValueMapOptions& options) {
  if (predicted_percentiles.size() != actual_values.size()) {
    throw std::invalid_argument("value map: length mismatch");
  }
  if (predicted_percentiles.size() < 2 * static_cast<size_t>(options.min_samples_leaf)) {
    throw std::invalid_argument("value map: need at least 2*min_samples_leaf rows");
  }
  std::vector<std::string> ids(predicted_percentiles.size());
  FeatureMatrix x(std::move(ids), {ColumnSpec{"percentile", ColumnKind::kNumeric, {}}});
  for (size_t r = 0; r < predicted_percentiles.size(); ++r) {
    if (actual_values[r] < 0 || !std::isfinite(actual_values[r])) {
      throw std::invalid_argument("value map: values must be finite and >= 0");
    }
    x.at(r, 0) = std::clamp(predicted_percentiles[r], 0.0, 1.0);
  }
  TreeParams params;
  params.max_depth = options.max_depth;
  params.min_samples_leaf = options.min_samples_leaf;
  params.features_per_split = 0;
  params.classification = false;
  const std::vector<double> weights(predicted_percentiles.size(), 1.0);
  return PercentileValueMap(GrowTree(x, actual_values, weights, params, 0));
}

QuantileValueMap::QuantileValueMap(std::vector<double> training_values)
    : sorted_(std::move(training_values)) {
  if (sorted_.empty()) throw std::invalid_argument("quantile map: no values");
  std::sort(sorted_.begin(), sorted_.end());
}

double QuantileValueMap::Apply(double percentile) const {
  const double p = std::clamp(percentile, 0.0, 1.0);
  const double pos = p * static_cast<double>(sorted_.size() - 1);
  const auto lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted_.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return sorted_[lo] * (1.0 - t) + sorted_[hi] * t;
}

PredictionRecord ApplyCalibration(const PlattModel& platt, const PercentileValueMap& map,
                                  double raw_churn_score, double raw_percentile) {
  PredictionRecord r;
  r.churn_prob_raw = raw_churn_score;
  r.churn_prob_calibrated = platt.Apply(raw_churn_score);
  r.percentile = raw_percentile;
  r.cltv_value = map.Apply(raw_percentile);
  return r;
}

}  // namespace cltv
