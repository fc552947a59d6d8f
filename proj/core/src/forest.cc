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

#include "cltv/forest.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "cltv/error.h"
#include "cltv/metrics.h"
#include "cltv/rng.h"

namespace cltv {

void ForestConfig::Validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  require(n_trees >= 1, "n_trees", "must be >= 1");
  require(max_depth >= 0, "max_depth", "must be >= 0");
  require(min_samples_leaf >= 1, "min_samples_leaf", "must be >= 1");
  require(threads >= 1, "threads", "must be >= 1");
}

int ForestConfig::FeaturesPerSplit(Task task, size_t n_features) const {
  const FeatureSampling mode = features_per_split.value_or(
      task == Task::kChurnClassifier ? FeatureSampling::kSqrt : FeatureSampling::kOneThird);
  const double p = static_cast<double>(n_features);
  double k = p;
  switch (mode) {
    case FeatureSampling::kSqrt:
      k = std::floor(std::sqrt(p));
      break;
    case FeatureSampling::kOneThird:
      k = std::floor(p / 3.0);
      break;
    case FeatureSampling::kAll:
      break;
  }
  return std::clamp(static_cast<int>(k), 1, static_cast<int>(n_features));
}

size_t DecisionTree::LeafIndex(std::span<const double> x) const {
  size_t i = 0;
  while (!nodes_[i].is_leaf()) {
    const TreeNode& n = nodes_[i];
    const double v = x[static_cast<size_t>(n.feature)];
    bool left;
    if (IsMissing(v)) {
      left = n.missing_left;
    } else if (n.known_categories != 0) {
      const auto c = static_cast<int64_t>(v);
      if (c < 0 || c >= 64 || !((n.known_categories >> c) & 1u)) {
        left = n.missing_left;
      } else {
        left = (n.left_categories >> c) & 1u;
      }
    } else {
      left = v < n.threshold;
    }
    i = static_cast<size_t>(left ? n.left : n.right);
  }
  return i;
}

size_t DecisionTree::leaf_count() const {
  return static_cast<size_t>(std::count_if(nodes_.begin(), nodes_.end(),
                                           [](const TreeNode& n) { return n.is_leaf(); }));
}

int DecisionTree::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<int> d(nodes_.size(), 0);
  int best = 0;
  // Children are always appended after their parent.
  for (size_t i = 0; i < nodes_.size(); ++i) {
    best = std::max(best, d[i]);
    if (!nodes_[i].is_leaf()) {
      d[static_cast<size_t>(nodes_[i].left)] = d[i] + 1;
      d[static_cast<size_t>(nodes_[i].right)] = d[i] + 1;
    }
  }
  return best;
}

namespace {

struct Candidate {
  bool found = false;
  double score = -std::numeric_limits<double>::infinity();
  int feature = -1;
  double threshold = 0.0;
  uint64_t left_categories = 0;
  uint64_t known_categories = 0;
  bool missing_left = false;
};

bool Improves(double score, double best) {
  return score > best + 1e-12 * std::abs(best);
}

class TreeGrower {
 public:
  TreeGrower(const FeatureMatrix& x, std::span<const double> y,
             std::span<const double> weights, const TreeParams& params, uint64_t seed,
             std::vector<double>* importance)
      : x_(x), y_(y), w_(weights), params_(params), rng_(seed), importance_(importance) {
    for (uint32_t r = 0; r < x.rows(); ++r) {
      if (weights[r] > 0) rows_.push_back(r);
    }
    features_.resize(x.cols());
    std::iota(features_.begin(), features_.end(), 0);
    mtry_ = params.features_per_split <= 0
                ? static_cast<int>(x.cols())
                : std::min(params.features_per_split, static_cast<int>(x.cols()));
  }

  DecisionTree Grow() {
    if (!rows_.empty()) Build(0, rows_.size(), 0);
    return DecisionTree(std::move(nodes_));
  }

 private:
  int32_t Build(size_t lo, size_t hi, int depth) {
    double W = 0, S = 0;
    double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
    for (size_t i = lo; i < hi; ++i) {
      const uint32_t r = rows_[i];
      W += w_[r];
      S += w_[r] * y_[r];
      y_min = std::min(y_min, y_[r]);
      y_max = std::max(y_max, y_[r]);
    }
    const auto index = static_cast<int32_t>(nodes_.size());
    TreeNode node;
    node.value = S / W;
    node.weight = W;
    nodes_.push_back(node);

    if (depth >= params_.max_depth || W < 2.0 * params_.min_samples_leaf ||
        y_min == y_max) {
      return index;
    }
    const Candidate best = FindSplit(lo, hi, W, S);
    if (!best.found) return index;

    const auto mid_it = std::stable_partition(
        rows_.begin() + static_cast<std::ptrdiff_t>(lo),
        rows_.begin() + static_cast<std::ptrdiff_t>(hi),
        [&](uint32_t r) { return GoesLeft(best, x_.at(r, static_cast<size_t>(best.feature))); });
    const auto mid = static_cast<size_t>(mid_it - rows_.begin());
    if (mid == lo || mid == hi) return index;

    if (importance_ != nullptr) {
      const double scale = params_.classification ? 2.0 : 1.0;
      (*importance_)[static_cast<size_t>(best.feature)] +=
          scale * std::max(0.0, best.score - S * S / W);
    }
    const int32_t left = Build(lo, mid, depth + 1);
    const int32_t right = Build(mid, hi, depth + 1);
    TreeNode& n = nodes_[static_cast<size_t>(index)];
    n.feature = best.feature;
    n.threshold = best.threshold;
    n.left_categories = best.left_categories;
    n.known_categories = best.known_categories;
    n.missing_left = best.missing_left;
    n.left = left;
    n.right = right;
    return index;
  }

  static bool GoesLeft(const Candidate& c, double v) {
    if (IsMissing(v)) return c.missing_left;
    if (c.known_categories != 0) {
      const auto id = static_cast<int64_t>(v);
      if (id < 0 || id >= 64 || !((c.known_categories >> id) & 1u)) return c.missing_left;
      return (c.left_categories >> id) & 1u;
    }
    return v < c.threshold;
  }

  Candidate FindSplit(size_t lo, size_t hi, double W, double S) {
    // Partial Fisher-Yates picks mtry features; they are scanned in id order.
    for (int i = 0; i < mtry_; ++i) {
      const auto j = static_cast<size_t>(i) +
                     UniformIndex(rng_, features_.size() - static_cast<size_t>(i));
      std::swap(features_[static_cast<size_t>(i)], features_[j]);
    }
    std::vector<int> chosen(features_.begin(), features_.begin() + mtry_);
    std::sort(chosen.begin(), chosen.end());

    Candidate best;
    for (int f : chosen) {
      if (x_.columns()[static_cast<size_t>(f)].kind == ColumnKind::kCategorical) {
        ScanCategorical(f, lo, hi, W, S, best);
      } else {
        ScanNumeric(f, lo, hi, W, S, best);
      }
    }
    return best;
  }

  void Consider(double wl, double sl, double wr, double sr, double wm, double sm,
                Candidate& best, Candidate proposal) {
    proposal.missing_left = wl >= wr;
    if (proposal.missing_left) {
      wl += wm;
      sl += sm;
    } else {
      wr += wm;
      sr += sm;
    }
    const double min_leaf = params_.min_samples_leaf;
    if (wl < min_leaf || wr < min_leaf) return;
    const double score = sl * sl / wl + sr * sr / wr;
    if (!best.found || Improves(score, best.score)) {
      proposal.found = true;
      proposal.score = score;
      best = proposal;
    }
  }

  void ScanNumeric(int f, size_t lo, size_t hi, double W, double S, Candidate& best) {
    const auto col = x_.column(static_cast<size_t>(f));
    sorted_.clear();
    double wm = 0, sm = 0;
    for (size_t i = lo; i < hi; ++i) {
      const uint32_t r = rows_[i];
      if (IsMissing(col[r])) {
        wm += w_[r];
        sm += w_[r] * y_[r];
      } else {
        sorted_.emplace_back(col[r], r);
      }
    }
    if (sorted_.size() < 2) return;
    std::sort(sorted_.begin(), sorted_.end());
    const double wn = W - wm, sn = S - sm;
    double wl = 0, sl = 0;
    for (size_t i = 0; i + 1 < sorted_.size(); ++i) {
      const uint32_t r = sorted_[i].second;
      wl += w_[r];
      sl += w_[r] * y_[r];
      const double a = sorted_[i].first, b = sorted_[i + 1].first;
      if (a == b) continue;
      double threshold = a + (b - a) / 2.0;
      if (threshold <= a) threshold = b;
      Candidate c;
      c.feature = f;
      c.threshold = threshold;
      Consider(wl, sl, wn - wl, sn - sl, wm, sm, best, c);
    }
  }

  void ScanCategorical(int f, size_t lo, size_t hi, double W, double S, Candidate& best) {
    const auto col = x_.column(static_cast<size_t>(f));
    const size_t n_cat = x_.columns()[static_cast<size_t>(f)].categories.size();
    if (n_cat > 63) throw std::invalid_argument("too many categories for subset splits");
    double wc[64] = {}, sc[64] = {};
    double wm = 0, sm = 0;
    for (size_t i = lo; i < hi; ++i) {
      const uint32_t r = rows_[i];
      const double v = col[r];
      const auto id = IsMissing(v) ? -1 : static_cast<int64_t>(v);
      if (id < 0 || static_cast<size_t>(id) >= n_cat) {
        wm += w_[r];
        sm += w_[r] * y_[r];
      } else {
        wc[id] += w_[r];
        sc[id] += w_[r] * y_[r];
      }
    }
    std::vector<int> present;
    uint64_t known = 0;
    for (size_t c = 0; c < n_cat; ++c) {
      if (wc[c] > 0) {
        present.push_back(static_cast<int>(c));
        known |= uint64_t{1} << c;
      }
    }
    const size_t m = present.size();
    if (m < 2) return;
    const double wn = W - wm, sn = S - sm;
    // The first present category is always on the left; the all-left subset
    // is not a split.
    const uint64_t limit = (uint64_t{1} << (m - 1)) - 1;
    for (uint64_t sub = 0; sub < limit; ++sub) {
      uint64_t mask = uint64_t{1} << present[0];
      double wl = wc[present[0]], sl = sc[present[0]];
      for (size_t b = 0; b + 1 < m; ++b) {
        if ((sub >> b) & 1u) {
          const int c = present[b + 1];
          mask |= uint64_t{1} << c;
          wl += wc[c];
          sl += sc[c];
        }
      }
      Candidate cand;
      cand.feature = f;
      cand.left_categories = mask;
      cand.known_categories = known;
      Consider(wl, sl, wn - wl, sn - sl, wm, sm, best, cand);
    }
  }

  const FeatureMatrix& x_;
  std::span<const double> y_;
  std::span<const double> w_;
  TreeParams params_;
  Rng rng_;
  std::vector<double>* importance_;
  std::vector<uint32_t> rows_;
  std::vector<int> features_;
  int mtry_ = 0;
  std::vector<TreeNode> nodes_;
  std::vector<std::pair<double, uint32_t>> sorted_;
};

void ParallelFor(size_t n, int threads, const std::function<void(size_t)>& body) {
  if (threads <= 1 || n <= 1) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mu;
  for (int t = 0; t < std::min<int>(threads, static_cast<int>(n)); ++t) {
    workers.emplace_back([&] {
      for (size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

DecisionTree GrowTree(const FeatureMatrix& x, std::span<const double> y,
                      std::span<const double> weights, const TreeParams& params,
                      uint64_t seed, std::vector<double>* importance) {
  if (y.size() != x.rows() || weights.size() != x.rows()) {
    throw std::invalid_argument("GrowTree: labels and weights must match rows");
  }
  if (importance != nullptr) importance->assign(x.cols(), 0.0);
  return TreeGrower(x, y, weights, params, seed, importance).Grow();
}

ForestModel::ForestModel(Task task, std::vector<ColumnSpec> columns,
                         std::vector<DecisionTree> trees, std::vector<double> importances)
    : task_(task),
      columns_(std::move(columns)),
      trees_(std::move(trees)),
      importances_(std::move(importances)) {}

std::vector<std::string> ForestModel::feature_names() const {
  std::vector<std::string> names;
  for (const ColumnSpec& c : columns_) names.push_back(c.name);
  return names;
}

double ForestModel::PredictMean(std::span<const double> x) const {
  if (x.size() != columns_.size()) {
    throw std::invalid_argument("feature count mismatch: model expects " +
                                std::to_string(columns_.size()) + ", got " +
                                std::to_string(x.size()));
  }
  double total = 0.0;
  for (const DecisionTree& t : trees_) total += t.Predict(x);
  return total / static_cast<double>(trees_.size());
}

ForestModel FitForest(const FeatureMatrix& x, std::span<const double> labels, Task task,
                      const ForestConfig& config) {
  config.Validate();
  if (labels.size() != x.rows()) throw std::invalid_argument("label count mismatch");
  if (x.rows() < 2 * static_cast<size_t>(config.min_samples_leaf)) {
    throw std::invalid_argument("need at least 2*min_samples_leaf rows");
  }
  if (x.cols() == 0) throw std::invalid_argument("no feature columns");
  for (double y : labels) {
    const bool ok = task == Task::kChurnClassifier ? (y == 0.0 || y == 1.0)
                                                   : (y >= 0.0 && y <= 1.0);
    if (!ok) throw std::invalid_argument("label out of range for task");
  }

  TreeParams params;
  params.max_depth = config.max_depth;
  params.min_samples_leaf = config.min_samples_leaf;
  params.features_per_split = config.FeaturesPerSplit(task, x.cols());
  params.classification = task == Task::kChurnClassifier;

  const size_t n_trees = static_cast<size_t>(config.n_trees);
  std::vector<DecisionTree> trees(n_trees);
  std::vector<std::vector<double>> importance(n_trees);
  ParallelFor(n_trees, config.threads, [&](size_t t) {
    Rng rng(MixSeed(config.seed, t));
    std::vector<double> weights(x.rows(), 1.0);
    if (config.bootstrap) {
      std::fill(weights.begin(), weights.end(), 0.0);
      for (size_t i = 0; i < x.rows(); ++i) weights[UniformIndex(rng, x.rows())] += 1.0;
    }
    trees[t] = GrowTree(x, labels, weights, params, rng(), &importance[t]);
  });

  std::vector<double> total(x.cols(), 0.0);
  for (const auto& imp : importance) {
    for (size_t c = 0; c < total.size(); ++c) total[c] += imp[c];
  }
  const double sum = std::accumulate(total.begin(), total.end(), 0.0);
  for (double& v : total) {
    v = sum > 0 ? v / sum : 1.0 / static_cast<double>(total.size());
  }
  return ForestModel(task, x.columns(), std::move(trees), std::move(total));
}

double PredictProba(const ForestModel& model, std::span<const double> x) {
  if (model.task() != Task::kChurnClassifier) {
    throw std::invalid_argument("PredictProba needs a churn classifier");
  }
  return model.PredictMean(x);
}

double PredictPercentile(const ForestModel& model, std::span<const double> x) {
  if (model.task() != Task::kPercentileRegressor) {
    throw std::invalid_argument("PredictPercentile needs a percentile regressor");
  }
  return std::clamp(model.PredictMean(x), 0.0, 1.0);
}

std::vector<double> PredictRows(const ForestModel& model, const FeatureMatrix& x) {
  if (x.columns().size() != model.columns().size()) {
    throw std::invalid_argument("feature count mismatch");
  }
  for (size_t c = 0; c < x.cols(); ++c) {
    if (x.columns()[c].name != model.columns()[c].name) {
      throw std::invalid_argument("feature column mismatch at '" + x.columns()[c].name + "'");
    }
  }
  std::vector<double> out(x.rows());
  for (size_t r = 0; r < x.rows(); ++r) {
    const std::vector<double> row = x.Row(r);
    out[r] = model.task() == Task::kChurnClassifier ? PredictProba(model, row)
                                                    : PredictPercentile(model, row);
  }
  return out;
}

std::vector<std::pair<std::string, double>> RankedImportance(const ForestModel& model) {
  std::vector<std::pair<std::string, double>> ranked;
  for (size_t c = 0; c < model.columns().size(); ++c) {
    ranked.emplace_back(model.columns()[c].name, model.importances()[c]);
  }
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return ranked;
}

std::vector<int> AssignFolds(std::span<const double> labels, Task task, int folds,
                             uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("need at least two folds");
  Rng rng(MixSeed(seed, 0xf01d));
  std::vector<int> fold(labels.size(), 0);
  std::vector<std::vector<size_t>> groups(task == Task::kChurnClassifier ? 2 : 1);
  for (size_t i = 0; i < labels.size(); ++i) {
    const size_t g = task == Task::kChurnClassifier && labels[i] != 0.0 ? 1 : 0;
    groups[g].push_back(i);
  }
  size_t position = 0;
  for (auto& group : groups) {
    Shuffle(group.begin(), group.end(), rng);
    for (size_t i : group) fold[i] = static_cast<int>(position++ % static_cast<size_t>(folds));
  }
  return fold;
}

CrossValidationResult CrossValidate(const FeatureMatrix& x, std::span<const double> labels,
                                    Task task, std::span<const ForestConfig> grid,
                                    int folds, uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("empty config grid");
  if (x.rows() < 2 * static_cast<size_t>(folds)) {
    throw std::invalid_argument("need at least 2*folds rows");
  }
  const std::vector<int> fold = AssignFolds(labels, task, folds, seed);
  CrossValidationResult result;
  for (const ForestConfig& config : grid) {
    std::vector<double> metrics;
    for (int k = 0; k < folds; ++k) {
      std::vector<size_t> train, valid;
      for (size_t i = 0; i < fold.size(); ++i) (fold[i] == k ? valid : train).push_back(i);
      std::vector<double> y_train, y_valid;
      for (size_t i : train) y_train.push_back(labels[i]);
      for (size_t i : valid) y_valid.push_back(labels[i]);
      const ForestModel model = FitForest(x.SelectRows(train), y_train, task, config);
      const std::vector<double> pred = PredictRows(model, x.SelectRows(valid));
      if (task == Task::kChurnClassifier) {
        std::vector<bool> truth;
        for (double y : y_valid) truth.push_back(y != 0.0);
        metrics.push_back(Auc(pred, truth));
      } else {
        metrics.push_back(Rmse(pred, y_valid));
      }
    }
    result.mean_metric.push_back(std::accumulate(metrics.begin(), metrics.end(), 0.0) /
                                 static_cast<double>(metrics.size()));
    result.fold_metrics.push_back(std::move(metrics));
  }
  for (size_t i = 1; i < grid.size(); ++i) {
    const double m = result.mean_metric[i], b = result.mean_metric[result.best_index];
    if (task == Task::kChurnClassifier ? m > b : m < b) result.best_index = i;
  }
  result.best = grid[result.best_index];
  return result;
}

}  // namespace cltv
