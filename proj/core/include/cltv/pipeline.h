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

#ifndef CLTV_PIPELINE_H_
#define CLTV_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cltv/calibration.h"
#include "cltv/config.h"
#include "cltv/metrics.h"
#include "cltv/model_io.h"
#include "cltv/modeling.h"

namespace cltv {

struct RunOptions {
  std::optional<uint64_t> seed;
  // Forces single-threaded embedding updates so reruns are byte-identical.
  bool deterministic = false;
  std::optional<std::filesystem::path> artifacts_dir;
  // Progress lines; null silences them.
  std::ostream* log = nullptr;
};

// Config with command-line overrides applied.
PipelineConfig ApplyOverrides(PipelineConfig config, const RunOptions& options);

// Artifact file names inside the artifacts directory.
namespace artifact {
inline constexpr const char* kTruth = "truth.json";
inline constexpr const char* kFeatures = "features.bin";
inline constexpr const char* kFeaturesCsv = "features.csv";
inline constexpr const char* kLabels = "labels.csv";
inline constexpr const char* kAudit = "leakage_audit.json";
inline constexpr const char* kEmbeddings = "embeddings.bin";
inline constexpr const char* kEmbeddingsTsv = "embeddings.tsv";
inline constexpr const char* kRoles = "split.csv";
inline constexpr const char* kModel = "model.bin";
inline constexpr const char* kModelDebug = "model_debug.json";
inline constexpr const char* kImportance = "importance.csv";
inline constexpr const char* kCalibratedModel = "model_calibrated.bin";
inline constexpr const char* kPredictions = "predictions.csv";
inline constexpr const char* kReport = "report.json";
inline constexpr const char* kReportTable = "report.txt";
inline constexpr const char* kCalibrationCurve = "calibration_curve.csv";
inline constexpr const char* kUplift = "uplift.json";
inline constexpr const char* kRollingSummary = "rolling_summary.json";
}  // namespace artifact

// Subcommands. Each validates its inputs, writes its artifacts atomically and
// records `<name>.manifest.json`. Missing inputs raise MissingArtifactError
// naming the producing subcommand.
void CmdDatagen(const PipelineConfig& config, const RunOptions& options);
void CmdFeatures(const PipelineConfig& config, const RunOptions& options);
void CmdEmbed(const PipelineConfig& config, const RunOptions& options);
void CmdTrain(const PipelineConfig& config, const RunOptions& options);
void CmdCalibrate(const PipelineConfig& config, const RunOptions& options);
void CmdPredict(const PipelineConfig& config, const RunOptions& options);
void CmdEvaluate(const PipelineConfig& config, const RunOptions& options);
void CmdRolling(const PipelineConfig& config, const RunOptions& options);
// datagen through evaluate in order.
void CmdRun(const PipelineConfig& config, const RunOptions& options);

// Dispatches by name; throws ConfigError("subcommand") for an unknown name.
void RunSubcommand(const std::string& name, const PipelineConfig& config,
                   const RunOptions& options);
const std::vector<std::string>& SubcommandNames();

// Differential leakage check: features and embedding-training pairs computed
// from the full log must equal those computed from the log truncated at the
// feature window end.
struct LeakageAudit {
  bool passed = true;
  size_t post_window_events = 0;
  size_t customers_compared = 0;
  size_t pairs_compared = 0;
  std::string detail;

  std::string ToJson() const;
};

LeakageAudit AuditNoLeakage(const EventLog& events, const TimeSplit& split,
                            int window_length);

// Row roles over a labeled cohort.
struct RoleSplit {
  std::vector<size_t> fit;
  std::vector<size_t> calibration;
  std::vector<size_t> test;
};

// `test_size` random test rows, then `calibration_fraction` of the remainder
// for calibration. Throws ConfigError unless test_size is below half the cohort.
RoleSplit AssignRoles(size_t n, size_t test_size, double calibration_fraction,
                      uint64_t seed);

// Churn classifier and percentile regressor on the same rows; with
// `cv.enabled`, forest depth and leaf size come from cross-validation.
ModelBundle FitBundle(const LabeledDataset& fit, const PipelineConfig& config);

// Platt on churn scores and the value map on predicted percentiles versus
// net spend, both from held-out calibration rows.
CalibrationModel FitCalibration(const ModelBundle& bundle, const LabeledDataset& calibration,
                                const CalibrationSettings& settings);

std::vector<PredictionRecord> PredictAll(const ModelBundle& bundle, const FeatureMatrix& x);

// Metrics on test rows. Extra figures: raw and calibrated ECE, summed mapped,
// naive and actual CLTV with relative errors, and the logistic baseline AUC
// when `baseline_fit` is given.
MetricReport EvaluatePredictions(std::span<const PredictionRecord> predictions,
                                 const LabeledDataset& test, int n_bins,
                                 const LabeledDataset* baseline_fit = nullptr,
                                 const std::vector<double>* naive_training_values = nullptr);

struct RollingPeriodReport {
  int period = 0;
  TimeSplit split{0, 1, 1};
  MetricReport metrics;
  LeakageAudit audit;
  size_t old_customers = 0;
  size_t new_customers = 0;
  // Old-customer drift from the previous period's embeddings; NaN in period 0.
  double warm_cosine = 0.0;
  double cold_cosine = 0.0;
  double cold_dimension_correlation = 0.0;
};

// The last period is the configured split; earlier periods step back by the
// stride. Throws DataError when the log does not cover every period.
std::vector<RollingPeriodReport> RunRolling(const EventLog& events,
                                            const PipelineConfig& config,
                                            std::ostream* log = nullptr);

}  // namespace cltv

#endif  // CLTV_PIPELINE_H_
