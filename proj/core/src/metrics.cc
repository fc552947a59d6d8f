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

#include "cltv/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "cltv/ranks.h"
#include <nlohmann/json.hpp>

namespace cltv {

namespace {

double Pearson(std::span<const double> a, std::span<const double> b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) throw std::invalid_argument("zero rank variance");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

}  // namespace

double Auc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("AUC: length mismatch");
  const std::vector<double> ranks = AverageRanks(scores);
  double n_pos = 0, rank_sum = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i]) {
      n_pos += 1;
      rank_sum += ranks[i];
    }
  }
  const double n_neg = static_cast<double>(labels.size()) - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("AUC: need both classes");
  // Average ranks are multiples of 0.5, so U is exact.
  const double u = rank_sum - n_pos * (n_pos + 1) / 2.0;
  return u / (n_pos * n_neg);
}

double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("Spearman: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("Spearman: need n >= 2");
  const std::vector<double> rx = AverageRanks(x);
  const std::vector<double> ry = AverageRanks(y);
  return Pearson(rx, ry);
}

double Rmse(std::span<const double> predicted, std::span<const double> actual) {
  if (predicted.size() != actual.size() || predicted.empty()) {
    throw std::invalid_argument("RMSE: need equal non-empty inputs");
  }
  double total = 0;
  for (size_t i = 0; i < predicted.size(); ++i) {
    const double d = predicted[i] - actual[i];
    total += d * d;
  }
  return std::sqrt(total / static_cast<double>(predicted.size()));
}

std::vector<CalibrationBin> CalibrationCurve(std::span<const double> scores,
                                             const std::vector<bool>& labels,
                                             size_t n_bins) {
  if (scores.size() != labels.size()) {
    throw std::invalid_argument("calibration curve: length mismatch");
  }
  if (n_bins == 0) throw std::invalid_argument("calibration curve: need bins");
  std::vector<size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return scores[a] < scores[b]; });
  const size_t n = scores.size();
  const size_t bins = std::max<size_t>(1, std::min(n_bins, n));
  std::vector<CalibrationBin> out;
  size_t begin = 0;
  for (size_t b = 0; b < bins; ++b) {
    const size_t end = (b + 1) * n / bins;
    CalibrationBin bin;
    double pred = 0, pos = 0;
    for (size_t i = begin; i < end; ++i) {
      pred += scores[order[i]];
      pos += labels[order[i]] ? 1.0 : 0.0;
    }
    bin.count = end - begin;
    if (bin.count > 0) {
      bin.mean_predicted = pred / static_cast<double>(bin.count);
      bin.empirical_rate = pos / static_cast<double>(bin.count);
    }
    bin.lower = b == 0 ? 0.0 : out.back().upper;
    bin.upper = b + 1 == bins ? 1.0
                              : (scores[order[end - 1]] + scores[order[end]]) / 2.0;
    out.push_back(bin);
    begin = end;
  }
  return out;
}

double ExpectedCalibrationError(std::span<const CalibrationBin> bins) {
  double total = 0, weighted = 0;
  for (const CalibrationBin& b : bins) {
    total += static_cast<double>(b.count);
    weighted += static_cast<double>(b.count) * std::abs(b.mean_predicted - b.empirical_rate);
  }
  return total > 0 ? weighted / total : 0.0;
}

double ExpectedCalibrationError(std::span<const double> scores,
                                const std::vector<bool>& labels, size_t n_bins) {
  return ExpectedCalibrationError(CalibrationCurve(scores, labels, n_bins));
}

std::string MetricReport::ToJson() const {
  nlohmann::ordered_json j;
  j["n"] = n;
  j["auc"] = auc;
  j["spearman"] = spearman;
  j["rmse"] = rmse;
  j["calibration_bins"] = nlohmann::ordered_json::array();
  for (const CalibrationBin& b : calibration_bins) {
    j["calibration_bins"].push_back({{"lower", b.lower},
                                     {"upper", b.upper},
                                     {"mean_predicted", b.mean_predicted},
                                     {"empirical_rate", b.empirical_rate},
                                     {"count", b.count}});
  }
  j["extra"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : extra) j["extra"][k] = v;
  return j.dump(2) + "\n";
}

MetricReport MetricReport::FromJson(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  MetricReport r;
  r.n = j.at("n").get<size_t>();
  r.auc = j.at("auc").get<double>();
  r.spearman = j.at("spearman").get<double>();
  r.rmse = j.at("rmse").get<double>();
  for (const auto& b : j.at("calibration_bins")) {
    CalibrationBin bin;
    bin.lower = b.at("lower").get<double>();
    bin.upper = b.at("upper").get<double>();
    bin.mean_predicted = b.at("mean_predicted").get<double>();
    bin.empirical_rate = b.at("empirical_rate").get<double>();
    bin.count = b.at("count").get<size_t>();
    r.calibration_bins.push_back(bin);
  }
  if (j.contains("extra")) {
    for (const auto& [k, v] : j.at("extra").items()) r.extra[k] = v.get<double>();
  }
  return r;
}

std::string MetricReport::FormatTable() const {
  std::ostringstream out;
  char line[128];
  auto row = [&](const std::string& name, double v) {
    std::snprintf(line, sizeof line, "%-32s %12.6f\n", name.c_str(), v);
    out << line;
  };
  std::snprintf(line, sizeof line, "%-32s %12zu\n", "customers", n);
  out << line;
  row("churn_auc", auc);
  row("cltv_spearman", spearman);
  row("percentile_rmse", rmse);
  for (const auto& [k, v] : extra) row(k, v);
  out << "\ncalibration (equal-mass bins)\n";
  std::snprintf(line, sizeof line, "%4s %10s %10s %8s\n", "bin", "predicted", "actual", "count");
  out << line;
  for (size_t i = 0; i < calibration_bins.size(); ++i) {
    const CalibrationBin& b = calibration_bins[i];
    std::snprintf(line, sizeof line, "%4zu %10.4f %10.4f %8zu\n", i, b.mean_predicted,
                  b.empirical_rate, b.count);
    out << line;
  }
  return out.str();
}

void WriteCalibrationCsv(std::span<const CalibrationBin> bins, std::ostream& out) {
  out << "bin,lower,upper,mean_predicted,empirical_rate,count\n";
  char line[192];
  for (size_t i = 0; i < bins.size(); ++i) {
    const CalibrationBin& b = bins[i];
    std::snprintf(line, sizeof line, "%zu,%.17g,%.17g,%.17g,%.17g,%zu\n", i, b.lower, b.upper,
                  b.mean_predicted, b.empirical_rate, b.count);
    out << line;
  }
}

}  // namespace cltv
