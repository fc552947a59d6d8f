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

#ifndef CLTV_FOREST_H_
#define CLTV_FOREST_H_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cltv/dataset.h"

namespace cltv {

enum class Task : uint8_t {
  kChurnClassifier = 0,
  kPercentileRegressor = 1,
};

enum class FeatureSampling : uint8_t {
  kSqrt = 0,
  kOneThird = 1,
  kAll = 2,
};

struct ForestConfig {
  int n_trees = 200;
  int max_depth = 12;
  // Minimum (bootstrap-weighted) sample count in each leaf.
  int min_samples_leaf = 25;
  // Unset: sqrt for classification, one third for regression.
  std::optional<FeatureSampling> features_per_split;
  bool bootstrap = true;
  uint64_t seed = 1;
  // Trees are fitted in parallel; results do not depend on the thread count.
  int threads = 1;

  void Validate() const;
  int FeaturesPerSplit(Task task, size_t n_features) const;
  bool operator==(const ForestConfig&) const = default;
};

struct TreeNode {
  // -1 marks a leaf.
  int32_t feature = -1;
  // Numeric and ordinal splits send x < threshold left.
  double threshold = 0.0;
  // Categorical splits send categories with their bit set left; categories
  // outside `known_categories` follow the missing direction.
  uint64_t left_categories = 0;
  uint64_t known_categories = 0;
  bool missing_left = false;
  int32_t left = -1;
  int32_t right = -1;
  // Positive fraction or mean target of the training samples reaching here.
  double value = 0.0;
  double weight = 0.0;

  bool is_leaf() const { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  DecisionTree() = default;
  explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_(std::move(nodes)) {}

  double Predict(std::span<const double> x) const { return nodes_[LeafIndex(x)].value; }
  size_t LeafIndex(std::span<const double> x) const;
  const std::vector<TreeNode>& nodes() const { return nodes_; }
  size_t leaf_count() const;
  int depth() const;
  bool operator==(const DecisionTree&) const = default;

 private:
  std::vector<TreeNode> nodes_;
};

struct TreeParams {
  int max_depth = 12;
  int min_samples_leaf = 25;
  // Features examined per split; 0 means all.
  int features_per_split = 0;
  bool classification = false;
};

// Grows one CART tree over rows with the given weights (0 excludes a row).
// Gini for classification, variance reduction for regression; thresholds at
// midpoints between consecutive distinct values; impurity ties go to the lower
// feature id and then the lower threshold; missing values follow the child
// with more non-missing weight. `importance` (size cols) accumulates weighted
// impurity decrease when non-null.
DecisionTree GrowTree(const FeatureMatrix& x, std::span<const double> y,
                      std::span<const double> weights, const TreeParams& params,
                      uint64_t seed, std::vector<double>* importance = nullptr);

class ForestModel {
 public:
  ForestModel() = default;
  ForestModel(Task task, std::vector<ColumnSpec> columns, std::vector<DecisionTree> trees,
              std::vector<double> importances);

  Task task() const { return task_; }
  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::vector<std::string> feature_names() const;
  const std::vector<DecisionTree>& trees() const { return trees_; }
  // Normalized mean decrease in impurity, one per column, summing to 1.
  const std::vector<double>& importances() const { return importances_; }

  // Mean of tree outputs; throws std::invalid_argument on a length mismatch.
  double PredictMean(std::span<const double> x) const;
  bool operator==(const ForestModel&) const = default;

 private:
  Task task_ = Task::kChurnClassifier;
  std::vector<ColumnSpec> columns_;
  std::vector<DecisionTree> trees_;
  std::vector<double> importances_;
};

// Labels are 0/1 for the classifier and percentiles in [0, 1] for the
// regressor. Throws std::invalid_argument with fewer than 2*min_samples_leaf
// rows or out-of-range labels.
ForestModel FitForest(const FeatureMatrix& x, std::span<const double> labels, Task task,
                      const ForestConfig& config);

// Throws std::invalid_argument if the model is not a classifier.
double PredictProba(const ForestModel& model, std::span<const double> x);
// Clipped to [0, 1]; throws std::invalid_argument if the model is not a regressor.
double PredictPercentile(const ForestModel& model, std::span<const double> x);
// Columns of `x` must match the model's by name and order.
std::vector<double> PredictRows(const ForestModel& model, const FeatureMatrix& x);

// (feature, weight) by descending weight, ties by column order.
std::vector<std::pair<std::string, double>> RankedImportance(const ForestModel& model);

struct CrossValidationResult {
  size_t best_index = 0;
  ForestConfig best;
  // fold_metrics[config][fold]: AUC for classification, RMSE for regression.
  std::vector<std::vector<double>> fold_metrics;
  std::vector<double> mean_metric;
};

// Fold id per row: stratified by label for classification, plain otherwise.
std::vector<int> AssignFolds(std::span<const double> labels, Task task, int folds,
                             uint64_t seed);

// Picks the config with the highest mean AUC (classification) or lowest mean
// RMSE (regression), earliest in the grid on ties. Throws std::invalid_argument
// for an empty grid or fewer than 2*folds rows.
CrossValidationResult CrossValidate(const FeatureMatrix& x, std::span<const double> labels,
                                    Task task, std::span<const ForestConfig> grid,
                                    int folds = 10, uint64_t seed = 1);

}  // namespace cltv

#endif  // CLTV_FOREST_H_
