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

#include "cltv/uplift.h"

#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cltv/metrics.h"
#include "cltv/modeling.h"
#include "cltv/rng.h"
#include <nlohmann/json.hpp>

namespace cltv {

TInterval StudentTInterval(std::span<const double> values, double confidence) {
  if (values.size() < 2) throw std::invalid_argument("t interval needs n >= 2");
  if (!(confidence > 0 && confidence < 1)) throw std::invalid_argument("bad confidence");
  TInterval t;
  t.n = values.size();
  const double n = static_cast<double>(t.n);
  t.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0;
  for (double v : values) ss += (v - t.mean) * (v - t.mean);
  t.std_dev = std::sqrt(ss / (n - 1));
  const boost::math::students_t dist(n - 1);
  const double q = boost::math::quantile(dist, 0.5 + confidence / 2);
  const double half = q * t.std_dev / std::sqrt(n);
  t.lower = t.mean - half;
  t.upper = t.mean + half;
  return t;
}

std::string UpliftResult::ToJson() const {
  nlohmann::ordered_json j;
  j["mean_uplift"] = interval.mean;
  j["std_dev"] = interval.std_dev;
  j["ci_lower"] = interval.lower;
  j["ci_upper"] = interval.upper;
  j["seeds"] = nlohmann::ordered_json::array();
  for (const UpliftSeedResult& s : seeds) {
    j["seeds"].push_back({{"seed", s.seed},
                          {"auc_features", s.auc_features},
                          {"auc_combined", s.auc_combined},
                          {"uplift", s.uplift}});
  }
  return j.dump(2) + "\n";
}

UpliftResult RunUpliftExperiment(const EventLog& events, const TimeSplit& split,
                                 const UpliftConfig& config) {
  if (config.n_seeds < 5) throw std::invalid_argument("n_seeds must be >= 5");
  const LabeledDataset base = BuildLabeledDataset(events, split);
  UpliftResult result;
  std::vector<double> uplifts;
  for (int s = 0; s < config.n_seeds; ++s) {
    const uint64_t seed = MixSeed(config.seed, static_cast<uint64_t>(s));
    const RowSplit rows = RandomRowSplit(base.x.rows(), config.test_size, seed);

    FeatureMatrix combined = base.x;
    if (!config.identical_arms) {
      SgnsConfig sgns = config.sgns;
      sgns.seed = MixSeed(seed, 1);
      const EmbeddingRun run = TrainEmbeddings(events, split, sgns);
      combined = base.x.JoinColumns(EmbeddingFeatures(ExportEmbeddings(run.model)));
    }

    ForestConfig forest = config.forest;
    forest.seed = MixSeed(seed, 2);
    std::vector<double> y_train;
    std::vector<bool> y_test;
    for (size_t r : rows.train) y_train.push_back(base.churn[r]);
    for (size_t r : rows.test) y_test.push_back(base.churn[r] != 0.0);

    auto test_auc = [&](const FeatureMatrix& x) {
      const ForestModel model =
          FitForest(x.SelectRows(rows.train), y_train, Task::kChurnClassifier, forest);
      return Auc(PredictRows(model, x.SelectRows(rows.test)), y_test);
    };
    UpliftSeedResult r;
    r.seed = seed;
    r.auc_features = test_auc(base.x);
    r.auc_combined = test_auc(combined);
    r.uplift = r.auc_combined - r.auc_features;
    uplifts.push_back(r.uplift);
    result.seeds.push_back(r);
  }
  result.interval = StudentTInterval(uplifts, config.confidence);
  return result;
}

}  // namespace cltv
