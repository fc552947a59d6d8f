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

#ifndef CLTV_DATASET_H_
#define CLTV_DATASET_H_

#include <cmath>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace cltv {

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool IsMissing(double v) { return std::isnan(v); }

enum class ColumnKind : uint8_t {
  kNumeric = 0,
  // Category ids 0..n-1; split by category subset. Id n is "unknown".
  kCategorical = 1,
  // Category ids ordered by descending training frequency; split by threshold.
  kOrdinal = 2,
};

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  // Vocabulary in id order for kCategorical and kOrdinal.
  std::vector<std::string> categories;

  bool operator==(const ColumnSpec&) const = default;
};

// Column-major design matrix; missing cells hold NaN.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  FeatureMatrix(std::vector<std::string> row_ids, std::vector<ColumnSpec> columns);

  size_t rows() const { return row_ids_.size(); }
  size_t cols() const { return columns_.size(); }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::vector<std::string> ColumnNames() const;

  double at(size_t row, size_t col) const { return values_[col * rows() + row]; }
  double& at(size_t row, size_t col) { return values_[col * rows() + row]; }
  std::span<const double> column(size_t col) const {
    return {values_.data() + col * rows(), rows()};
  }
  std::vector<double> Row(size_t row) const;

  // Rows in the given order.
  FeatureMatrix SelectRows(std::span<const size_t> rows) const;
  // Appends `other`'s columns, matching rows by id; rows absent from `other`
  // get missing cells.
  FeatureMatrix JoinColumns(const FeatureMatrix& other) const;

  bool operator==(const FeatureMatrix& other) const;

 private:
  std::vector<std::string> row_ids_;
  std::vector<ColumnSpec> columns_;
  std::vector<double> values_;
};

// "CLTVMAT\0" | u32 version | u64 rows | u32 cols | column specs | row ids |
// rows*cols f64 column-major.
inline constexpr uint32_t kMatrixFileVersion = 1;
void WriteFeatureMatrix(const FeatureMatrix& m, std::ostream& out);
FeatureMatrix ReadFeatureMatrix(std::istream& in);
void SaveFeatureMatrix(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix LoadFeatureMatrix(const std::filesystem::path& path);

}  // namespace cltv

#endif  // CLTV_DATASET_H_
