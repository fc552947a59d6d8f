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

#ifndef CLTV_CONFIG_H_
#define CLTV_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "cltv/datagen.h"
#include "cltv/events.h"
#include "cltv/forest.h"
#include "cltv/sgns.h"

namespace cltv {

struct SplitSettings {
  // Unset: the last feature_days + label_days of the generated horizon.
  std::optional<Timestamp> feature_start;
  int64_t feature_days = kDaysPerYear;
  int64_t label_days = kDaysPerYear;
  bool operator==(const SplitSettings&) const = default;
};

struct CvSettings {
  bool enabled = false;
  int folds = 10;
  std::vector<int> max_depth_grid = {6, 12};
  std::vector<int> min_samples_leaf_grid = {25};
  // Rows sampled for the search; 0 uses the whole training split.
  int64_t sample_size = 0;
  bool operator==(const CvSettings&) const = default;
};

struct CalibrationSettings {
  // Share of the training cohort held out to fit calibration.
  double fraction = 0.2;
  bool logit_input = false;
  int value_map_depth = 6;
  int value_map_min_leaf = 50;
  bool operator==(const CalibrationSettings&) const = default;
};

struct EvaluationSettings {
  int64_t test_size = 2000;
  int n_bins = 10;
  // Seeds for the embedding uplift run inside `evaluate`; 0 skips it.
  int uplift_seeds = 0;
  bool operator==(const EvaluationSettings&) const = default;
};

struct ModeSettings {
  bool use_embeddings = true;
  bool warm_start = true;
  bool operator==(const ModeSettings&) const = default;
};

struct RollingSettings {
  int n_periods = 3;
  int64_t stride_days = 30;
  bool operator==(const RollingSettings&) const = default;
};

// Every section is optional in the file; absent keys take the defaults below.
// Unknown keys are rejected. Relative paths resolve against the directory of
// the config file.
struct PipelineConfig {
  std::string events_path = "events.ndjson";
  std::string artifacts_dir = "artifacts";
  // Drives every model seed; datagen keeps its own.
  uint64_t seed = 1;
  GenConfig datagen;
  SplitSettings split;
  SgnsConfig sgns;
  ForestConfig forest;
  CvSettings cv;
  CalibrationSettings calibration;
  EvaluationSettings evaluation;
  ModeSettings mode;
  RollingSettings rolling;

  // Not serialized.
  std::filesystem::path base_dir;

  // Throws ConfigError naming the dotted field path.
  static PipelineConfig FromJson(const std::string& text,
                                 const std::filesystem::path& base_dir = {});
  // Throws ConfigError ("config") when the file cannot be read.
  static PipelineConfig Load(const std::filesystem::path& path);
  // Complete document with every field, in schema order.
  std::string ToJson() const;
  std::string Hash() const;
  void Validate() const;

  std::filesystem::path EventsPath() const;
  std::filesystem::path ArtifactsDir() const;
  TimeSplit ResolveSplit() const;
  SgnsConfig ResolvedSgns() const;
  ForestConfig ResolvedForest() const;

  bool operator==(const PipelineConfig& other) const;
};

}  // namespace cltv

#endif  // CLTV_CONFIG_H_
