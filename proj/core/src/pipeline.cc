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

#include "cltv/pipeline.h"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include "artifacts_internal.h"
#include "cltv/artifacts.h"
#include "cltv/baseline.h"
#include "cltv/datagen.h"
#include "cltv/embedding_io.h"
#include "cltv/error.h"
#include "cltv/event_io.h"
#include "cltv/features.h"
#include "cltv/pairgen.h"
#include "cltv/rng.h"
#include "cltv/uplift.h"
#include <nlohmann/json.hpp>

namespace cltv {

namespace fs = std::filesystem;

namespace {

constexpr uint64_t kRoleStream = 0x70135;

std::string Now() {
  const auto now = std::chrono::system_clock::now();
  return FormatTimestamp(
      std::chrono::duration_cast<std::chrono::seconds>(now.time_since_epoch()).count());
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double ParseNum(const std::string& text, const std::string& where) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError(where + ": bad number '" + text + "'");
  }
  return v;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Reads a CSV with the expected header; returns the data rows.
std::vector<std::vector<std::string>> ReadCsv(const fs::path& path, const std::string& header,
                                              size_t width) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw DataError(path.filename().string() + ": unexpected header");
  }
  std::vector<std::vector<std::string>> rows;
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto cells = SplitCsv(line);
    if (cells.size() != width) {
      throw DataError(path.filename().string() + ":" + std::to_string(line_no) +
                      ": expected " + std::to_string(width) + " fields");
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

// Collects provenance for one subcommand run.
class Recorder {
 public:
  Recorder(std::string name, const PipelineConfig& config, const RunOptions& options)
      : dir_(config.ArtifactsDir()) {
    fs::create_directories(dir_);
    manifest_.subcommand = std::move(name);
    manifest_.config_hash = config.Hash();
    manifest_.seed = config.seed;
    manifest_.deterministic = options.deterministic;
    manifest_.started_at = Now();
    manifest_.config_json = config.ToJson();
    log_ = options.log;
  }

  fs::path Path(const std::string& name) const { return dir_ / name; }

  void Input(const fs::path& path) { manifest_.inputs[Key(path)] = Sha256File(path); }
  void Output(const fs::path& path) { manifest_.outputs[Key(path)] = Sha256File(path); }

  void Log(const std::string& line) const {
    if (log_ != nullptr) *log_ << "[" << manifest_.subcommand << "] " << line << "\n";
  }

  void Finish() {
    manifest_.finished_at = Now();
    WriteManifest(manifest_, dir_ / (manifest_.subcommand + ".manifest.json"));
  }

 private:
  std::string Key(const fs::path& path) const {
    const fs::path rel = path.lexically_relative(dir_);
    return rel.empty() || rel.string().rfind("..", 0) == 0 ? path.filename().string()
                                                            : rel.string();
  }

  fs::path dir_;
  RunManifest manifest_;
  std::ostream* log_ = nullptr;
};

void Require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) throw MissingArtifactError(path.filename().string(), producer);
}

EventLog LoadEvents(const PipelineConfig& config, Recorder& rec) {
  const fs::path path = config.EventsPath();
  Require(path, "datagen");
  EventLog events = ReadEventsFile(path);
  ValidateEventLog(events);
  rec.Input(path);
  return events;
}

void WriteLabelsCsv(const LabelSet& labels, const fs::path& path) {
  std::string out = "customer_id,net_spend,churned,percentile\n";
  for (const LabelRecord& r : labels.records) {
    out += r.customer_id + "," + Num(r.net_spend) + "," + (r.churned ? "1" : "0") + "," +
           Num(r.percentile) + "\n";
  }
  AtomicWriteFile(path, out);
}

LabelSet ReadLabelsCsv(const fs::path& path) {
  LabelSet labels;
  for (const auto& row : ReadCsv(path, "customer_id,net_spend,churned,percentile", 4)) {
    LabelRecord r;
    r.customer_id = row[0];
    r.net_spend = ParseNum(row[1], "labels.csv");
    r.churned = row[2] == "1";
    r.percentile = ParseNum(row[3], "labels.csv");
    labels.records.push_back(r);
  }
  return labels;
}

void WriteRoles(const RoleSplit& roles, const std::vector<std::string>& ids,
                const fs::path& path) {
  std::vector<const char*> role(ids.size(), "");
  for (size_t i : roles.fit) role[i] = "fit";
  for (size_t i : roles.calibration) role[i] = "calibration";
  for (size_t i : roles.test) role[i] = "test";
  std::string out = "customer_id,role\n";
  for (size_t i = 0; i < ids.size(); ++i) out += ids[i] + "," + role[i] + "\n";
  AtomicWriteFile(path, out);
}

RoleSplit ReadRoles(const fs::path& path, const std::vector<std::string>& ids) {
  const auto rows = ReadCsv(path, "customer_id,role", 2);
  if (rows.size() != ids.size()) throw DataError("split.csv does not match the feature cohort");
  RoleSplit roles;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i][0] != ids[i]) throw DataError("split.csv does not match the feature cohort");
    const std::string& r = rows[i][1];
    if (r == "fit") {
      roles.fit.push_back(i);
    } else if (r == "calibration") {
      roles.calibration.push_back(i);
    } else if (r == "test") {
      roles.test.push_back(i);
    } else {
      throw DataError("split.csv: unknown role '" + r + "'");
    }
  }
  return roles;
}

constexpr const char* kPredictionHeader =
    "customer_id,churn_prob_raw,churn_prob_calibrated,percentile,cltv_value";

void WritePredictions(std::span<const PredictionRecord> records, const fs::path& path) {
  std::string out = std::string(kPredictionHeader) + "\n";
  for (const PredictionRecord& r : records) {
    out += r.customer_id + "," + Num(r.churn_prob_raw) + "," + Num(r.churn_prob_calibrated) +
           "," + Num(r.percentile) + "," + Num(r.cltv_value) + "\n";
  }
  AtomicWriteFile(path, out);
}

std::vector<PredictionRecord> ReadPredictions(const fs::path& path) {
  std::vector<PredictionRecord> out;
  for (const auto& row : ReadCsv(path, kPredictionHeader, 5)) {
    PredictionRecord r;
    r.customer_id = row[0];
    r.churn_prob_raw = ParseNum(row[1], "predictions.csv");
    r.churn_prob_calibrated = ParseNum(row[2], "predictions.csv");
    r.percentile = ParseNum(row[3], "predictions.csv");
    r.cltv_value = ParseNum(row[4], "predictions.csv");
    out.push_back(r);
  }
  return out;
}

// Feature matrix, labels and (optionally) embedding columns from artifacts.
LabeledDataset LoadDataset(const PipelineConfig& config, Recorder& rec) {
  const fs::path features = rec.Path(artifact::kFeatures);
  const fs::path labels = rec.Path(artifact::kLabels);
  Require(features, "features");
  Require(labels, "features");
  LabeledDataset data;
  data.x = LoadFeatureMatrix(features);
  data.labels = ReadLabelsCsv(labels);
  rec.Input(features);
  rec.Input(labels);
  if (data.labels.records.size() != data.x.rows()) {
    throw DataError("labels.csv and features.bin disagree on the cohort");
  }
  for (size_t i = 0; i < data.x.rows(); ++i) {
    const LabelRecord& r = data.labels.records[i];
    if (r.customer_id != data.x.row_ids()[i]) {
      throw DataError("labels.csv and features.bin disagree at " + r.customer_id);
    }
    data.churn.push_back(r.churned ? 1.0 : 0.0);
    data.percentile.push_back(r.percentile);
    data.net_spend.push_back(r.net_spend);
  }
  if (config.mode.use_embeddings) {
    // The text table is the full-precision copy.
    const fs::path emb = rec.Path(artifact::kEmbeddingsTsv);
    Require(emb, "embed");
    std::ifstream in(emb);
    data.x = data.x.JoinColumns(EmbeddingFeatures(ReadEmbeddingTsv(in)));
    rec.Input(emb);
  }
  return data;
}

std::vector<bool> ChurnFlags(const LabeledDataset& d) {
  std::vector<bool> out;
  for (double c : d.churn) out.push_back(c != 0.0);
  return out;
}

void WriteImportance(const ModelBundle& bundle, const fs::path& path) {
  std::string out = "model,rank,feature,importance\n";
  for (const auto* model : {&bundle.churn, &bundle.percentile}) {
    const char* name = model->task() == Task::kChurnClassifier ? "churn" : "percentile";
    size_t rank = 1;
    for (const auto& [feature, weight] : RankedImportance(*model)) {
      out += std::string(name) + "," + std::to_string(rank++) + "," + feature + "," +
             Num(weight) + "\n";
    }
  }
  AtomicWriteFile(path, out);
}

std::string Json(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace

PipelineConfig ApplyOverrides(PipelineConfig config, const RunOptions& options) {
  if (options.seed) {
    config.seed = *options.seed;
    config.datagen.seed = *options.seed;
  }
  if (options.artifacts_dir) config.artifacts_dir = fs::absolute(*options.artifacts_dir).string();
  if (options.deterministic) config.sgns.threads = 1;
  config.Validate();
  return config;
}

std::string LeakageAudit::ToJson() const {
  nlohmann::ordered_json j;
  j["passed"] = passed;
  j["post_window_events"] = post_window_events;
  j["customers_compared"] = customers_compared;
  j["pairs_compared"] = pairs_compared;
  j["detail"] = detail;
  return Json(j);
}

LeakageAudit AuditNoLeakage(const EventLog& events, const TimeSplit& split,
                            int window_length) {
  LeakageAudit audit;
  EventLog truncated;
  for (const CustomerEvent& e : events) {
    if (e.ts < split.feature_end()) {
      truncated.push_back(e);
    } else {
      ++audit.post_window_events;
    }
  }
  const auto full = ComputeFeatures(events, split);
  const auto cut = ComputeFeatures(truncated, split);
  audit.customers_compared = full.size();
  auto same = [](double a, double b) {
    return (IsMissing(a) && IsMissing(b)) || a == b;
  };
  if (full.size() != cut.size()) {
    audit.passed = false;
    audit.detail = "feature cohort changed";
    return audit;
  }
  for (size_t i = 0; i < full.size() && audit.passed; ++i) {
    if (full[i].customer_id != cut[i].customer_id || full[i].country != cut[i].country) {
      audit.passed = false;
      audit.detail = "feature row changed for " + full[i].customer_id;
    }
    for (const NumericFeature& f : kNumericFeatures) {
      if (!same(full[i].*(f.field), cut[i].*(f.field))) {
        audit.passed = false;
        audit.detail = std::string(f.name) + " changed for " + full[i].customer_id;
        break;
      }
    }
  }
  if (!audit.passed) return audit;

  auto named_pairs = [&](const EventLog& log) {
    const ViewStreams streams = BuildViewStreams(log, split);
    std::vector<std::pair<std::string, std::string>> out;
    for (const TrainingPair& p : GenerateAllPairs(streams, window_length)) {
      out.emplace_back(streams.index.id(p.in), streams.index.id(p.out));
    }
    return out;
  };
  const auto full_pairs = named_pairs(events);
  audit.pairs_compared = full_pairs.size();
  if (full_pairs != named_pairs(truncated)) {
    audit.passed = false;
    audit.detail = "embedding training pairs changed";
  }
  return audit;
}

RoleSplit AssignRoles(size_t n, size_t test_size, double calibration_fraction,
                      uint64_t seed) {
  if (test_size == 0 || 2 * test_size >= n) {
    throw ConfigError("evaluation.test_size", "must be below half the cohort (" +
                                                  std::to_string(n) + " customers)");
  }
  const RowSplit outer = RandomRowSplit(n, test_size, MixSeed(seed, kRoleStream));
  const auto n_cal = static_cast<size_t>(
      std::llround(calibration_fraction * static_cast<double>(outer.train.size())));
  const RowSplit inner =
      RandomRowSplit(outer.train.size(), std::clamp<size_t>(n_cal, 1, outer.train.size() - 1),
                     MixSeed(seed, kRoleStream + 1));
  RoleSplit roles;
  roles.test = outer.test;
  for (size_t i : inner.train) roles.fit.push_back(outer.train[i]);
  for (size_t i : inner.test) roles.calibration.push_back(outer.train[i]);
  return roles;
}

ModelBundle FitBundle(const LabeledDataset& fit, const PipelineConfig& config) {
  const ForestConfig base = config.ResolvedForest();
  auto choose = [&](Task task, const std::vector<double>& labels) {
    if (!config.cv.enabled) return base;
    std::vector<ForestConfig> grid;
    for (int depth : config.cv.max_depth_grid) {
      for (int leaf : config.cv.min_samples_leaf_grid) {
        ForestConfig c = base;
        c.max_depth = depth;
        c.min_samples_leaf = leaf;
        grid.push_back(c);
      }
    }
    if (config.cv.sample_size > 0 &&
        static_cast<size_t>(config.cv.sample_size) < fit.x.rows()) {
      const RowSplit s = RandomRowSplit(fit.x.rows(), static_cast<size_t>(config.cv.sample_size),
                                        MixSeed(config.seed, 0xc5));
      std::vector<double> sub;
      for (size_t r : s.test) sub.push_back(labels[r]);
      return CrossValidate(fit.x.SelectRows(s.test), sub, task, grid, config.cv.folds,
                           config.seed)
          .best;
    }
    return CrossValidate(fit.x, labels, task, grid, config.cv.folds, config.seed).best;
  };
  ModelBundle bundle;
  bundle.churn = FitForest(fit.x, fit.churn, Task::kChurnClassifier,
                           choose(Task::kChurnClassifier, fit.churn));
  ForestConfig pct = choose(Task::kPercentileRegressor, fit.percentile);
  pct.seed = MixSeed(pct.seed, 1);
  bundle.percentile = FitForest(fit.x, fit.percentile, Task::kPercentileRegressor, pct);
  return bundle;
}

CalibrationModel FitCalibration(const ModelBundle& bundle, const LabeledDataset& calibration,
                                const CalibrationSettings& settings) {
  const std::vector<double> churn = PredictRows(bundle.churn, calibration.x);
  const std::vector<double> pct = PredictRows(bundle.percentile, calibration.x);
  CalibrationModel model;
  try {
    PlattOptions platt;
    platt.logit_input = settings.logit_input;
    model.platt = FitPlatt(churn, ChurnFlags(calibration), platt);
    ValueMapOptions map;
    map.max_depth = settings.value_map_depth;
    map.min_samples_leaf = settings.value_map_min_leaf;
    model.value_map = FitPercentileValueMap(pct, calibration.net_spend, map);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("calibration: ") + e.what());
  }
  return model;
}

std::vector<PredictionRecord> PredictAll(const ModelBundle& bundle, const FeatureMatrix& x) {
  if (!bundle.calibration) throw DataError("model bundle has no calibration section");
  const std::vector<double> churn = PredictRows(bundle.churn, x);
  const std::vector<double> pct = PredictRows(bundle.percentile, x);
  std::vector<PredictionRecord> out;
  for (size_t r = 0; r < x.rows(); ++r) {
    PredictionRecord rec = ApplyCalibration(bundle.calibration->platt,
                                            bundle.calibration->value_map, churn[r], pct[r]);
    rec.customer_id = x.row_ids()[r];
    out.push_back(rec);
  }
  return out;
}

MetricReport EvaluatePredictions(std::span<const PredictionRecord> predictions,
                                 const LabeledDataset& test, int n_bins,
                                 const LabeledDataset* baseline_fit,
                                 const std::vector<double>* naive_training_values) {
  if (predictions.size() != test.churn.size()) {
    throw DataError("prediction and label counts differ");
  }
  std::vector<double> raw, calibrated, pct, mapped;
  for (const PredictionRecord& p : predictions) {
    raw.push_back(p.churn_prob_raw);
    calibrated.push_back(p.churn_prob_calibrated);
    pct.push_back(p.percentile);
    mapped.push_back(p.cltv_value);
  }
  const std::vector<bool> churned = ChurnFlags(test);
  MetricReport report;
  report.n = predictions.size();
  try {
    report.auc = Auc(raw, churned);
    report.spearman = Spearman(pct, test.net_spend);
    report.rmse = Rmse(pct, test.percentile);
  } catch (const std::invalid_argument& e) {
    throw DataError(std::string("evaluation: ") + e.what());
  }
  const auto bins = static_cast<size_t>(n_bins);
  report.calibration_bins = CalibrationCurve(calibrated, churned, bins);
  report.extra["churn_rate"] =
      std::accumulate(test.churn.begin(), test.churn.end(), 0.0) / static_cast<double>(report.n);
  report.extra["ece_raw"] = ExpectedCalibrationError(raw, churned, bins);
  report.extra["ece_calibrated"] = ExpectedCalibrationError(report.calibration_bins);
  const double actual = std::accumulate(test.net_spend.begin(), test.net_spend.end(), 0.0);
  const double total_mapped = std::accumulate(mapped.begin(), mapped.end(), 0.0);
  report.extra["cltv_sum_actual"] = actual;
  report.extra["cltv_sum_mapped"] = total_mapped;
  report.extra["cltv_relative_error_mapped"] =
      actual > 0 ? std::abs(total_mapped - actual) / actual : 0.0;
  if (naive_training_values != nullptr && !naive_training_values->empty()) {
    const QuantileValueMap naive(*naive_training_values);
    double total_naive = 0;
    for (double p : pct) total_naive += naive.Apply(p);
    report.extra["cltv_sum_naive"] = total_naive;
    report.extra["cltv_relative_error_naive"] =
        actual > 0 ? std::abs(total_naive - actual) / actual : 0.0;
  }
  if (baseline_fit != nullptr) {
    const LogisticBaseline lr = FitLogisticBaseline(baseline_fit->x, baseline_fit->churn);
    report.extra["baseline_logistic_auc"] = Auc(lr.PredictRows(test.x), churned);
  }
  return report;
}

void CmdDatagen(const PipelineConfig& config, const RunOptions& options) {
  Recorder rec("datagen", config, options);
  GeneratedData data;
  try {
    data = Generate(config.datagen);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("datagen", e.what());
  }
  const fs::path events = config.EventsPath();
  if (!events.parent_path().empty()) fs::create_directories(events.parent_path());
  WriteEventsFile(data.events, events);
  AtomicWriteFile(rec.Path(artifact::kTruth), TruthToJson(data.truth));
  rec.Output(events);
  rec.Output(rec.Path(artifact::kTruth));
  rec.Log(std::to_string(data.events.size()) + " events for " +
          std::to_string(data.truth.size()) + " customers");
  rec.Finish();
}

void CmdFeatures(const PipelineConfig& config, const RunOptions& options) {
  Recorder rec("features", config, options);
  const EventLog events = LoadEvents(config, rec);
  const TimeSplit split = config.ResolveSplit();
  const LabelSet labels = DeriveLabels(events, split);
  const std::vector<FeatureVector> vectors = ComputeFeatures(events, split);
  std::vector<std::string> countries;
  for (const FeatureVector& v : vectors) countries.push_back(v.country);
  const FeatureMatrix x = EncodeFeatures(vectors, CategoryEncoder::Fit(countries));
  const LeakageAudit audit = AuditNoLeakage(events, split, config.sgns.window_length);

  SaveFeatureMatrix(x, rec.Path(artifact::kFeatures));
  internal::AtomicWrite(rec.Path(artifact::kFeaturesCsv),
                        [&](std::ostream& out) { WriteFeaturesCsv(vectors, out); });
  WriteLabelsCsv(labels, rec.Path(artifact::kLabels));
  AtomicWriteFile(rec.Path(artifact::kAudit), audit.ToJson());
  for (const char* name : {artifact::kFeatures, artifact::kFeaturesCsv, artifact::kLabels,
                           artifact::kAudit}) {
    rec.Output(rec.Path(name));
  }
  if (!audit.passed) throw DataError("leakage audit failed: " + audit.detail);
  rec.Log(std::to_string(x.rows()) + " customers, " + std::to_string(x.cols()) +
          " columns, " + std::to_string(labels.clamped_customers) + " clamped labels");
  rec.Finish();
}

void CmdEmbed(const PipelineConfig& config, const RunOptions& options) {
  Recorder rec("embed", config, options);
  const EventLog events = LoadEvents(config, rec);
  const EmbeddingRun run = TrainEmbeddings(events, config.ResolveSplit(), config.ResolvedSgns());
  SaveEmbeddingModel(run.model, rec.Path(artifact::kEmbeddings));
  internal::AtomicWrite(rec.Path(artifact::kEmbeddingsTsv), [&](std::ostream& out) {
    WriteEmbeddingTsv(ExportEmbeddings(run.model), out);
  });
  rec.Output(rec.Path(artifact::kEmbeddings));
  rec.Output(rec.Path(artifact::kEmbeddingsTsv));
  rec.Log(std::to_string(run.model.rows()) + " customers, " + std::to_string(run.pairs) +
          " pairs, final epoch loss " + Num(run.result.epoch_loss.back()));
  rec.Finish();
}

void CmdTrain(const PipelineConfig& config, const RunOptions& options) {
  Recorder rec("train", config, options);
  const LabeledDataset data = LoadDataset(config, rec);
  const RoleSplit roles =
      AssignRoles(data.x.rows(), static_cast<size_t>(config.evaluation.test_size),
                  config.calibration.fraction, config.seed);
  const ModelBundle bundle = FitBundle(data.SelectRows(roles.fit), config);
  WriteRoles(roles, data.x.row_ids(), rec.Path(artifact::kRoles));
  SaveModelBundle(bundle, rec.Path(artifact::kModel));
  WriteImportance(bundle, rec.Path(artifact::kImportance));
  AtomicWriteFile(rec.Path(artifact::kModelDebug), ForestDebugJson(bundle.churn, 1));
  for (const char* name :
       {artifact::kRoles, artifact::kModel, artifact::kImportance, artifact::kModelDebug}) {
    rec.Output(rec.Path(name));
  }
  rec.Log(std::to_string(roles.fit.size()) + " fit, " +
          std::to_string(roles.calibration.size()) + " calibration, " +
          std::to_string(roles.test.size()) + " test rows");
  rec.Finish();
}

void CmdCalibrate(const PipelineConfig& config, const RunOptions& options) {
  Recorder rec("calibrate", config, options);
  const fs::path model_path = rec.Path(artifact::kModel);
  const fs::path roles_path = rec.Path(artifact::kRoles);
  Require(model_path, "train");
  Require(roles_path, "train");
  ModelBundle bundle = LoadModelBundle(model_path);
  rec.Input(model_path);
  const LabeledDataset data = LoadDataset(config, rec);
  const RoleSplit roles = ReadRoles(roles_path, data.x.row_ids());
  rec.Input(roles_path);
  bundle.calibration = FitCalibration(bundle, data.SelectRows(roles.calibration),
                                      config.calibration);
  SaveModelBundle(bundle, rec.Path(artifact::kCalibratedModel));
  rec.Output(rec.Path(artifact::kCalibratedModel));
  rec.Log("platt a=" + Num(bundle.calibration->platt.a) +
          " b=" + Num(bundle.calibration->platt.b) + ", value map with " +
          std::to_string(bundle.calibration->value_map.tree().leaf_count()) + " leaves");
  rec.Finish();
}

void CmdPredict(const PipelineConfig& config, const RunOptions& options) {
  Recorder rec("predict", config, options);
  Require(rec.Path(artifact::kModel), "train");
  const fs::path model_path = rec.Path(artifact::kCalibratedModel);
  Require(model_path, "calibrate");
  const ModelBundle bundle = LoadModelBundle(model_path);
  rec.Input(model_path);
  const LabeledDataset data = LoadDataset(config, rec);
  WritePredictions(PredictAll(bundle, data.x), rec.Path(artifact::kPredictions));
  rec.Output(rec.Path(artifact::kPredictions));
  rec.Log(std::to_string(data.x.rows()) + " predictions");
  rec.Finish();
}

void CmdEvaluate(const PipelineConfig& config, const RunOptions& options) {
  Recorder rec("evaluate", config, options);
  const fs::path pred_path = rec.Path(artifact::kPredictions);
  const fs::path roles_path = rec.Path(artifact::kRoles);
  Require(roles_path, "train");
  Require(pred_path, "predict");
  const LabeledDataset data = LoadDataset(config, rec);
  const RoleSplit roles = ReadRoles(roles_path, data.x.row_ids());
  const std::vector<PredictionRecord> all = ReadPredictions(pred_path);
  rec.Input(roles_path);
  rec.Input(pred_path);
  if (all.size() != data.x.rows()) throw DataError("predictions.csv does not match the cohort");
  std::vector<PredictionRecord> test_pred;
  for (size_t r : roles.test) {
    if (all[r].customer_id != data.x.row_ids()[r]) {
      throw DataError("predictions.csv does not match the cohort");
    }
    test_pred.push_back(all[r]);
  }
  const LabeledDataset fit = data.SelectRows(roles.fit);
  MetricReport report = EvaluatePredictions(test_pred, data.SelectRows(roles.test),
                                            config.evaluation.n_bins, &fit, &fit.net_spend);
  if (config.evaluation.uplift_seeds > 0) {
    const EventLog events = LoadEvents(config, rec);
    UpliftConfig uplift;
    uplift.n_seeds = config.evaluation.uplift_seeds;
    uplift.test_size = static_cast<size_t>(config.evaluation.test_size);
    uplift.seed = config.seed;
    uplift.sgns = config.ResolvedSgns();
    uplift.forest = config.ResolvedForest();
    const UpliftResult result = RunUpliftExperiment(events, config.ResolveSplit(), uplift);
    AtomicWriteFile(rec.Path(artifact::kUplift), result.ToJson());
    rec.Output(rec.Path(artifact::kUplift));
    report.extra["uplift_mean"] = result.interval.mean;
    report.extra["uplift_ci_lower"] = result.interval.lower;
    report.extra["uplift_ci_upper"] = result.interval.upper;
  }
  AtomicWriteFile(rec.Path(artifact::kReport), report.ToJson());
  AtomicWriteFile(rec.Path(artifact::kReportTable), report.FormatTable());
  internal::AtomicWrite(rec.Path(artifact::kCalibrationCurve), [&](std::ostream& out) {
    WriteCalibrationCsv(report.calibration_bins, out);
  });
  for (const char* name :
       {artifact::kReport, artifact::kReportTable, artifact::kCalibrationCurve}) {
    rec.Output(rec.Path(name));
  }
  rec.Log("test AUC " + Num(report.auc) + ", Spearman " + Num(report.spearman));
  rec.Finish();
}

std::vector<RollingPeriodReport> RunRolling(const EventLog& events,
                                            const PipelineConfig& config, std::ostream* log) {
  if (events.empty()) throw DataError("empty event log");
  const TimeSplit last = config.ResolveSplit();
  const int n = config.rolling.n_periods;
  const int64_t stride = config.rolling.stride_days * kSecondsPerDay;
  Timestamp first_ts = events.front().ts, last_ts = events.front().ts;
  for (const CustomerEvent& e : events) {
    first_ts = std::min(first_ts, e.ts);
    last_ts = std::max(last_ts, e.ts);
  }
  const Timestamp first_start = last.feature_start() - (n - 1) * stride;
  // A period starting before the first event would have a partial feature window.
  if (first_start < first_ts - kSecondsPerDay || last.label_end() > last_ts + kSecondsPerDay) {
    throw DataError("event log spans " + std::to_string((last_ts - first_ts) / kSecondsPerDay) +
                    " days; " + std::to_string(n) + " periods with a " +
                    std::to_string(config.rolling.stride_days) + "-day stride need " +
                    std::to_string((last.label_end() - first_start) / kSecondsPerDay));
  }

  std::vector<RollingPeriodReport> reports;
  std::optional<EmbeddingModel> prior;
  for (int p = 0; p < n; ++p) {
    // Seeds count back from the last period, which matches a single-split run.
    const auto back = static_cast<uint64_t>(n - 1 - p);
    auto period_seed = [back](uint64_t seed) { return back == 0 ? seed : MixSeed(seed, back); };
    RollingPeriodReport report;
    report.period = p;
    report.split = TimeSplit::FromStart(first_start + p * stride, config.split.feature_days,
                                        config.split.label_days);
    report.audit = AuditNoLeakage(events, report.split, config.sgns.window_length);
    if (!report.audit.passed) {
      throw DataError("leakage audit failed in period " + std::to_string(p) + ": " +
                      report.audit.detail);
    }
    LabeledDataset data = BuildLabeledDataset(events, report.split);

    SgnsConfig sgns = config.ResolvedSgns();
    sgns.seed = period_seed(sgns.seed);
    const EmbeddingRun cold = TrainEmbeddings(events, report.split, sgns);
    EmbeddingModel current = cold.model;
    report.warm_cosine = report.cold_cosine = report.cold_dimension_correlation =
        std::numeric_limits<double>::quiet_NaN();
    if (prior) {
      const CohortMap cohorts = CohortMap::FromIndices(prior->index(), cold.model.index());
      const std::vector<std::string> old(cohorts.old_customers.begin(),
                                         cohorts.old_customers.end());
      report.old_customers = old.size();
      report.new_customers = cohorts.new_customers.size();
      if (!old.empty()) {
        report.cold_cosine = MeanRowCosine(*prior, cold.model, old);
        report.cold_dimension_correlation =
            MeanAbsDimensionCorrelation(*prior, cold.model, old);
      }
      if (config.mode.warm_start) {
        const EmbeddingRun warm = TrainEmbeddings(events, report.split, sgns, &*prior);
        if (!old.empty()) report.warm_cosine = MeanRowCosine(*prior, warm.model, old);
        current = warm.model;
      }
    } else {
      report.new_customers = cold.model.rows();
    }
    if (config.mode.use_embeddings) {
      data.x = data.x.JoinColumns(EmbeddingFeatures(ExportEmbeddings(current)));
    }
    prior = std::move(current);

    const RoleSplit roles =
        AssignRoles(data.x.rows(), static_cast<size_t>(config.evaluation.test_size),
                    config.calibration.fraction, period_seed(config.seed));
    ModelBundle bundle = FitBundle(data.SelectRows(roles.fit), config);
    bundle.calibration =
        FitCalibration(bundle, data.SelectRows(roles.calibration), config.calibration);
    const LabeledDataset test = data.SelectRows(roles.test);
    const LabeledDataset fit = data.SelectRows(roles.fit);
    report.metrics = EvaluatePredictions(PredictAll(bundle, test.x), test,
                                         config.evaluation.n_bins, nullptr, &fit.net_spend);
    if (log != nullptr) {
      *log << "[rolling] period " << p << " (" << FormatTimestamp(report.split.feature_start())
           << "): AUC " << report.metrics.auc << ", warm cosine " << report.warm_cosine
           << ", cold cosine " << report.cold_cosine << "\n";
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

void CmdRolling(const PipelineConfig& config, const RunOptions& options) {
  Recorder rec("rolling", config, options);
  const EventLog events = LoadEvents(config, rec);
  const std::vector<RollingPeriodReport> reports = RunRolling(events, config, options.log);
  nlohmann::ordered_json summary = nlohmann::ordered_json::array();
  for (const RollingPeriodReport& r : reports) {
    const std::string dir = "rolling/period_" + std::to_string(r.period);
    fs::create_directories(rec.Path(dir));
    AtomicWriteFile(rec.Path(dir + "/report.json"), r.metrics.ToJson());
    AtomicWriteFile(rec.Path(dir + "/leakage_audit.json"), r.audit.ToJson());
    rec.Output(rec.Path(dir + "/report.json"));
    rec.Output(rec.Path(dir + "/leakage_audit.json"));
    auto finite = [](double v) {
      return std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json();
    };
    summary.push_back({{"period", r.period},
                       {"feature_start", FormatTimestamp(r.split.feature_start())},
                       {"feature_end", FormatTimestamp(r.split.feature_end())},
                       {"label_end", FormatTimestamp(r.split.label_end())},
                       {"auc", r.metrics.auc},
                       {"spearman", r.metrics.spearman},
                       {"old_customers", r.old_customers},
                       {"new_customers", r.new_customers},
                       {"warm_cosine", finite(r.warm_cosine)},
                       {"cold_cosine", finite(r.cold_cosine)},
                       {"cold_dimension_correlation", finite(r.cold_dimension_correlation)},
                       {"leakage_audit_passed", r.audit.passed}});
  }
  AtomicWriteFile(rec.Path(artifact::kRollingSummary), Json(summary));
  rec.Output(rec.Path(artifact::kRollingSummary));
  rec.Finish();
}

void CmdRun(const PipelineConfig& config, const RunOptions& options) {
  CmdDatagen(config, options);
  CmdFeatures(config, options);
  if (config.mode.use_embeddings) CmdEmbed(config, options);
  CmdTrain(config, options);
  CmdCalibrate(config, options);
  CmdPredict(config, options);
  CmdEvaluate(config, options);
}

const std::vector<std::string>& SubcommandNames() {
  static const std::vector<std::string> names = {
      "datagen", "features", "embed",    "train", "calibrate",
      "predict", "evaluate", "rolling", "run"};
  return names;
}

void RunSubcommand(const std::string& name, const PipelineConfig& config,
                   const RunOptions& options) {
  using Fn = void (*)(const PipelineConfig&, const RunOptions&);
  static const std::map<std::string, Fn> table = {
      {"datagen", CmdDatagen},   {"features", CmdFeatures}, {"embed", CmdEmbed},
      {"train", CmdTrain},       {"calibrate", CmdCalibrate}, {"predict", CmdPredict},
      {"evaluate", CmdEvaluate}, {"rolling", CmdRolling},   {"run", CmdRun}};
  const auto it = table.find(name);
  if (it == table.end()) throw ConfigError("subcommand", "unknown subcommand '" + name + "'");
  it->second(ApplyOverrides(config, options), options);
}

}  // namespace cltv
