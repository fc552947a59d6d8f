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

#include <cmath>
#include <sstream>

#include "cltv/forest.h"
#include "cltv/metrics.h"
#include "cltv/model_io.h"
#include "cltv/rng.h"

namespace cltv {
namespace {

FeatureMatrix Numeric(size_t rows, size_t cols) {
  std::vector<std::string> ids;
  for (size_t i = 0; i < rows; ++i) ids.push_back("r" + std::to_string(i));
  std::vector<ColumnSpec> specs;
  for (size_t j = 0; j < cols; ++j) specs.push_back({"f" + std::to_string(j), ColumnKind::kNumeric, {}});
  return FeatureMatrix(ids, specs);
}

ForestConfig Small(int trees = 20, uint64_t seed = 1) {
  ForestConfig c;
  c.n_trees = trees;
  c.min_samples_leaf = 5;
  c.seed = seed;
  return c;
}

// y depends on column 0 only; column 1 is noise.
void Planted(FeatureMatrix& x, std::vector<double>& y, uint64_t seed) {
  Rng rng(seed);
  y.resize(x.rows());
  for (size_t i = 0; i < x.rows(); ++i) {
    x.at(i, 0) = UniformUnit(rng);
    x.at(i, 1) = UniformUnit(rng);
    y[i] = UniformUnit(rng) < 0.2 + 0.6 * x.at(i, 0) ? 1 : 0;
  }
}

std::vector<bool> AsBool(const std::vector<double>& y) {
  std::vector<bool> b;
  for (double v : y) b.push_back(v > 0.5);
  return b;
}

TEST(ForestConfig, Validation) {
  ForestConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.n_trees = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = ForestConfig();
  c.min_samples_leaf = 0;
  EXPECT_THROW(c.Validate(), std::invalid_argument);
  c = ForestConfig();
  EXPECT_EQ(c.FeaturesPerSplit(Task::kChurnClassifier, 25), 5);
  EXPECT_EQ(c.FeaturesPerSplit(Task::kPercentileRegressor, 30), 10);
  c.features_per_split = FeatureSampling::kAll;
  EXPECT_EQ(c.FeaturesPerSplit(Task::kChurnClassifier, 25), 25);
}

TEST(Forest, ConstantLabelsGiveSingleLeaves) {
  FeatureMatrix x = Numeric(100, 2);
  std::vector<double> y(100, 1.0);
  Planted(x, y, 1);
  std::fill(y.begin(), y.end(), 1.0);
  const ForestModel m = FitForest(x, y, Task::kChurnClassifier, Small());
  for (const DecisionTree& t : m.trees()) {
    ASSERT_EQ(t.nodes().size(), 1u);
    EXPECT_EQ(t.nodes()[0].value, 1.0);
  }
  double sum = 0;
  for (double v : m.importances()) sum += v;
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(Forest, SeparableDataGivesPerfectTrainingAuc) {
  FeatureMatrix x = Numeric(1000, 1);
  std::vector<double> y(1000);
  Rng rng(2);
  for (size_t i = 0; i < 1000; ++i) {
    x.at(i, 0) = UniformSymmetric(rng, 1.0);
    y[i] = x.at(i, 0) < 0 ? 1 : 0;
  }
  const ForestModel m = FitForest(x, y, Task::kChurnClassifier, Small());
  EXPECT_EQ(Auc(PredictRows(m, x), AsBool(y)), 1.0);
  EXPECT_EQ(m.importances(), std::vector<double>{1.0});
}

TEST(Forest, SignalFeatureOutranksNoise) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    FeatureMatrix x = Numeric(600, 2);
    std::vector<double> y;
    Planted(x, y, 10 + seed);
    const ForestModel m = FitForest(x, y, Task::kChurnClassifier, Small(30, seed));
    EXPECT_GT(m.importances()[0], m.importances()[1]) << "seed " << seed;
    const auto ranked = RankedImportance(m);
    EXPECT_EQ(ranked[0].first, "f0");
  }
}

TEST(Forest, NoiseFeaturesShareImportance) {
  double mean0 = 0;
  for (uint64_t seed = 0; seed < 20; ++seed) {
    FeatureMatrix x = Numeric(400, 2);
    std::vector<double> y(400);
    Rng rng(100 + seed);
    for (size_t i = 0; i < 400; ++i) {
      x.at(i, 0) = UniformUnit(rng);
      x.at(i, 1) = UniformUnit(rng);
      y[i] = UniformUnit(rng) < 0.4 ? 1 : 0;
    }
    const ForestModel m = FitForest(x, y, Task::kChurnClassifier, Small(30, seed));
    mean0 += m.importances()[0] / 20;
  }
  EXPECT_NEAR(mean0, 0.5, 0.1);
}

TEST(ForestModel, OneLeafAndIdenticalTrees) {
  const std::vector<ColumnSpec> cols = {{"f0", ColumnKind::kNumeric, {}}};
  TreeNode leaf;
  leaf.value = 0.3;
  const DecisionTree one({leaf});
  const ForestModel single(Task::kChurnClassifier, cols, {one}, {1.0});
  const std::vector<double> x = {0.7};
  EXPECT_EQ(PredictProba(single, x), 0.3);

  FeatureMatrix fx = Numeric(200, 1);
  std::vector<double> y;
  Rng rng(3);
  for (size_t i = 0; i < 200; ++i) {
    fx.at(i, 0) = UniformUnit(rng);
    y.push_back(fx.at(i, 0) > 0.5 ? 1 : 0);
  }
  const DecisionTree t = FitForest(fx, y, Task::kChurnClassifier, Small(1)).trees()[0];
  const ForestModel solo(Task::kChurnClassifier, cols, {t}, {1.0});
  const ForestModel triple(Task::kChurnClassifier, cols, {t, t, t}, {1.0});
  for (double v : {0.1, 0.4, 0.6, 0.9}) {
    const std::vector<double> row = {v};
    EXPECT_DOUBLE_EQ(PredictProba(triple, row), PredictProba(solo, row));
  }
  EXPECT_THROW(single.PredictMean(std::vector<double>{1.0, 2.0}), std::invalid_argument);
}

TEST(Forest, OutputsStayInUnitIntervalAndMissingIsRouted) {
  FeatureMatrix x = Numeric(500, 3);
  std::vector<double> y(500);
  Rng rng(4);
  for (size_t i = 0; i < 500; ++i) {
    for (size_t j = 0; j < 3; ++j) x.at(i, j) = UniformUnit(rng) < 0.1 ? kMissing : UniformUnit(rng);
    y[i] = UniformUnit(rng);
  }
  const ForestModel reg = FitForest(x, y, Task::kPercentileRegressor, Small());
  for (double& v : y) v = v > 0.5 ? 1 : 0;
  const ForestModel cls = FitForest(x, y, Task::kChurnClassifier, Small());
  for (int t = 0; t < 500; ++t) {
    std::vector<double> row(3);
    for (double& v : row) {
      const double u = UniformUnit(rng);
      v = u < 0.2 ? kMissing : UniformSymmetric(rng, 1e6);
    }
    const double p = PredictProba(cls, row);
    const double q = PredictPercentile(reg, row);
    EXPECT_TRUE(p >= 0 && p <= 1);
    EXPECT_TRUE(q >= 0 && q <= 1);
  }
  const std::vector<double> all_missing(3, kMissing);
  EXPECT_TRUE(std::isfinite(PredictProba(cls, all_missing)));
  EXPECT_THROW(PredictProba(reg, all_missing), std::invalid_argument);
  EXPECT_THROW(PredictPercentile(cls, all_missing), std::invalid_argument);
}

TEST(DecisionTree, PiecewiseConstantBetweenThresholds) {
  FeatureMatrix x = Numeric(300, 2);
  std::vector<double> y;
  Planted(x, y, 5);
  const std::vector<double> w(300, 1.0);
  TreeParams params;
  params.min_samples_leaf = 5;
  params.classification = true;
  const DecisionTree tree = GrowTree(x, y, w, params, 1);
  std::vector<double> thresholds = {-1e300, 1e300};
  for (const TreeNode& n : tree.nodes()) {
    if (!n.is_leaf() && n.feature == 0) thresholds.push_back(n.threshold);
  }
  std::sort(thresholds.begin(), thresholds.end());
  Rng rng(6);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> row = {UniformUnit(rng), UniformUnit(rng)};
    const auto hi = std::upper_bound(thresholds.begin(), thresholds.end(), row[0]);
    const double lo = *(hi - 1);
    std::vector<double> moved = row;
    moved[0] = lo + (std::min(*hi, 2.0) - lo) * UniformUnit(rng);
    if (moved[0] < lo) continue;
    EXPECT_EQ(tree.Predict(row), tree.Predict(moved));
  }
}

TEST(DecisionTree, TiesGoToTheLowerFeature) {
  FeatureMatrix x = Numeric(100, 2);
  std::vector<double> y(100);
  for (size_t i = 0; i < 100; ++i) {
    x.at(i, 0) = x.at(i, 1) = static_cast<double>(i);
    y[i] = i < 40 ? 1 : 0;
  }
  const std::vector<double> w(100, 1.0);
  TreeParams params;
  params.max_depth = 1;
  params.min_samples_leaf = 1;
  params.classification = true;
  const DecisionTree tree = GrowTree(x, y, w, params, 1);
  EXPECT_EQ(tree.nodes()[0].feature, 0);
  EXPECT_DOUBLE_EQ(tree.nodes()[0].threshold, 39.5);
}

TEST(DecisionTree, CategoricalSubsetSplit) {
  std::vector<std::string> ids;
  for (int i = 0; i < 400; ++i) ids.push_back("r" + std::to_string(i));
  FeatureMatrix x(ids, {{"country", ColumnKind::kCategorical, {"a", "b", "c", "d"}}});
  std::vector<double> y(400);
  for (size_t i = 0; i < 400; ++i) {
    const int cat = static_cast<int>(i % 4);
    x.at(i, 0) = cat;
    y[i] = (cat == 0 || cat == 2) ? 1 : 0;
  }
  const std::vector<double> w(400, 1.0);
  TreeParams params;
  params.max_depth = 1;
  params.min_samples_leaf = 1;
  params.classification = true;
  const DecisionTree tree = GrowTree(x, y, w, params, 1);
  const TreeNode& root = tree.nodes()[0];
  ASSERT_FALSE(root.is_leaf());
  EXPECT_NE(root.known_categories, 0u);
  for (double cat : {0.0, 1.0, 2.0, 3.0}) {
    const std::vector<double> row = {cat};
    EXPECT_EQ(tree.Predict(row), (cat == 0 || cat == 2) ? 1.0 : 0.0);
  }
  // An unseen id and a missing value both take the missing branch.
  const std::vector<double> unknown = {4.0}, missing = {kMissing};
  EXPECT_EQ(tree.Predict(unknown), tree.Predict(missing));
}

TEST(Forest, MoreTreesMeanLessSeedVariance) {
  FeatureMatrix x = Numeric(400, 2);
  std::vector<double> y;
  Planted(x, y, 7);
  std::vector<double> variance;
  for (int trees : {1, 10, 50}) {
    std::vector<std::vector<double>> preds;
    for (uint64_t seed = 0; seed < 8; ++seed) preds.push_back(PredictRows(FitForest(x, y, Task::kChurnClassifier, Small(trees, seed)), x));
    double total = 0;
    for (size_t i = 0; i < x.rows(); ++i) {
      double m = 0, s = 0;
      for (const auto& p : preds) m += p[i] / 8;
      for (const auto& p : preds) s += (p[i] - m) * (p[i] - m) / 7;
      total += s / static_cast<double>(x.rows());
    }
    variance.push_back(total);
  }
  EXPECT_GT(variance[0], variance[1]);
  EXPECT_GT(variance[1], variance[2]);
}

TEST(Forest, ThreadCountDoesNotChangeTheModel) {
  FeatureMatrix x = Numeric(300, 2);
  std::vector<double> y;
  Planted(x, y, 8);
  ForestConfig c = Small(12);
  const ForestModel one = FitForest(x, y, Task::kChurnClassifier, c);
  c.threads = 4;
  EXPECT_EQ(FitForest(x, y, Task::kChurnClassifier, c), one);
}

TEST(Forest, RejectsBadInput) {
  FeatureMatrix x = Numeric(100, 2);
  std::vector<double> y;
  Planted(x, y, 9);
  std::vector<double> bad = y;
  bad[3] = 0.5;
  EXPECT_THROW(FitForest(x, bad, Task::kChurnClassifier, Small()), std::invalid_argument);
  bad[3] = 1.5;
  EXPECT_THROW(FitForest(x, bad, Task::kPercentileRegressor, Small()), std::invalid_argument);
  ForestConfig big = Small();
  big.min_samples_leaf = 60;
  EXPECT_THROW(FitForest(x, y, Task::kChurnClassifier, big), std::invalid_argument);

  const ForestModel m = FitForest(x, y, Task::kChurnClassifier, Small(3));
  FeatureMatrix renamed({"a"}, {{"f1", ColumnKind::kNumeric, {}}, {"f0", ColumnKind::kNumeric, {}}});
  EXPECT_THROW(PredictRows(m, renamed), std::invalid_argument);
}

TEST(ModelIo, BundleRoundTrip) {
  FeatureMatrix x = Numeric(200, 2);
  std::vector<double> y;
  Planted(x, y, 10);
  ModelBundle bundle;
  bundle.churn = FitForest(x, y, Task::kChurnClassifier, Small(4));
  for (size_t i = 0; i < y.size(); ++i) y[i] = x.at(i, 1);
  bundle.percentile = FitForest(x, y, Task::kPercentileRegressor, Small(4));
  for (int calibrated = 0; calibrated < 2; ++calibrated) {
    if (calibrated) {
      CalibrationModel cal;
      cal.platt.a = 1.25;
      cal.platt.b = -0.5;
      cal.value_map = PercentileValueMap(bundle.percentile.trees()[0]);
      bundle.calibration = cal;
    }
    std::stringstream buf;
    WriteModelBundle(bundle, buf);
    EXPECT_EQ(ReadModelBundle(buf), bundle);
  }
  std::string bytes;
  {
    std::stringstream buf;
    WriteModelBundle(bundle, buf);
    bytes = buf.str();
  }
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  EXPECT_ANY_THROW(ReadModelBundle(truncated));
  EXPECT_NE(ForestDebugJson(bundle.churn, 1).find("\"trees\""), std::string::npos);
}

TEST(CrossValidate, FoldsPartitionRowsAndStratify) {
  std::vector<double> y(103);
  for (size_t i = 0; i < y.size(); ++i) y[i] = i % 3 == 0 ? 1 : 0;
  const std::vector<int> folds = AssignFolds(y, Task::kChurnClassifier, 10, 1);
  ASSERT_EQ(folds.size(), y.size());
  std::vector<int> size(10, 0), positives(10, 0);
  for (size_t i = 0; i < y.size(); ++i) {
    ASSERT_GE(folds[i], 0);
    ASSERT_LT(folds[i], 10);
    ++size[folds[i]];
    positives[folds[i]] += y[i] > 0.5;
  }
  for (int f = 0; f < 10; ++f) {
    EXPECT_GE(size[f], 10);
    EXPECT_LE(size[f], 11);
    EXPECT_GE(positives[f], 3);
    EXPECT_LE(positives[f], 4);
  }
}

TEST(CrossValidate, SingleConfigAndEmptyGrid) {
  FeatureMatrix x = Numeric(200, 2);
  std::vector<double> y;
  Planted(x, y, 11);
  const std::vector<ForestConfig> grid = {Small(5)};
  const CrossValidationResult r = CrossValidate(x, y, Task::kChurnClassifier, grid, 5, 1);
  EXPECT_EQ(r.best_index, 0u);
  EXPECT_EQ(r.best, grid[0]);
  ASSERT_EQ(r.fold_metrics.size(), 1u);
  EXPECT_EQ(r.fold_metrics[0].size(), 5u);
  EXPECT_THROW(CrossValidate(x, y, Task::kChurnClassifier, {}, 5, 1), std::invalid_argument);
}

TEST(CrossValidate, XorNeedsTheDeeperTree) {
  FeatureMatrix x = Numeric(800, 2);
  std::vector<double> y(800);
  Rng rng(12);
  for (size_t i = 0; i < 800; ++i) {
    x.at(i, 0) = UniformSymmetric(rng, 1);
    x.at(i, 1) = UniformSymmetric(rng, 1);
    y[i] = (x.at(i, 0) > 0) != (x.at(i, 1) > 0) ? 1 : 0;
  }
  std::vector<ForestConfig> grid = {Small(10), Small(10)};
  grid[0].max_depth = 1;
  grid[1].max_depth = 8;
  for (auto& c : grid) c.features_per_split = FeatureSampling::kAll;
  const CrossValidationResult r = CrossValidate(x, y, Task::kChurnClassifier, grid, 5, 1);
  EXPECT_EQ(r.best_index, 1u);
  EXPECT_GT(r.mean_metric[1], 0.9);
  EXPECT_LT(r.mean_metric[0], 0.7);
}

}  // namespace
}  // namespace cltv
