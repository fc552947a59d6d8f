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

#ifndef CLTV_MODEL_IO_H_
#define CLTV_MODEL_IO_H_

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "cltv/calibration.h"
#include "cltv/forest.h"

namespace cltv {

struct ModelBundle {
  ForestModel churn;
  ForestModel percentile;
  // Filled in by the calibration step.
  std::optional<CalibrationModel> calibration;

  bool operator==(const ModelBundle&) const = default;
};

// Binary layout, little-endian:
//   "CLTVMDL\0" | u32 version | forest churn | forest percentile |
//   u8 has_calibration [platt | value-map tree]
// forest: u8 task | u32 cols | column specs | cols f64 importances |
//         u32 trees | trees
// tree:   u32 nodes | nodes x (i32 feature, f64 threshold, u64 left_categories,
//         u64 known_categories, u8 missing_left, i32 left, i32 right,
//         f64 value, f64 weight)
inline constexpr uint32_t kModelFileVersion = 1;
void WriteModelBundle(const ModelBundle& bundle, std::ostream& out);
ModelBundle ReadModelBundle(std::istream& in);
void SaveModelBundle(const ModelBundle& bundle, const std::filesystem::path& path);
ModelBundle LoadModelBundle(const std::filesystem::path& path);

// Human-readable tree structure; trees beyond `max_trees` are omitted.
std::string ForestDebugJson(const ForestModel& model, size_t max_trees = 3);

}  // namespace cltv

#endif  // CLTV_MODEL_IO_H_
