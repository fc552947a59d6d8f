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

#include "cltv/dataset.h"

#include <cstring>
#include <fstream>
#include <stdexcept>
#include <unordered_map>

#include "artifacts_internal.h"
#include "binary_io.h"
#include "cltv/error.h"

namespace cltv {

FeatureMatrix::FeatureMatrix(std::vector<std::string> row_ids,
                             std::vector<ColumnSpec> columns)
    : row_ids_(std::move(row_ids)),
      columns_(std::move(columns)),
      values_(row_ids_.size() * columns_.size(), kMissing) {}

std::vector<std::string> FeatureMatrix::ColumnNames() const {
  std::vector<std::string> names;
  for (const ColumnSpec& c : columns_) names.push_back(c.name);
  return names;
}

std::vector<double> FeatureMatrix::Row(size_t row) const {
  std::vector<double> out(cols());
  for (size_t c = 0; c < cols(); ++c) out[c] = at(row, c);
  return out;
}

FeatureMatrix FeatureMatrix::SelectRows(std::span<const size_t> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (size_t r : rows) ids.push_back(row_ids_.at(r));
  FeatureMatrix out(std::move(ids), columns_);
  for (size_t c = 0; c < cols(); ++c) {
    for (size_t i = 0; i < rows.size(); ++i) out.at(i, c) = at(rows[i], c);
  }
  return out;
}

FeatureMatrix FeatureMatrix::JoinColumns(const FeatureMatrix& other) const {
  std::vector<ColumnSpec> columns = columns_;
  columns.insert(columns.end(), other.columns_.begin(), other.columns_.end());
  FeatureMatrix out(row_ids_, std::move(columns));
  std::copy(values_.begin(), values_.end(), out.values_.begin());
  std::unordered_map<std::string_view, size_t> other_rows;
  for (size_t r = 0; r < other.rows(); ++r) other_rows.emplace(other.row_ids_[r], r);
  for (size_t r = 0; r < rows(); ++r) {
    auto it = other_rows.find(row_ids_[r]);
    if (it == other_rows.end()) continue;
    for (size_t c = 0; c < other.cols(); ++c) {
      out.at(r, cols() + c) = other.at(it->second, c);
    }
  }
  return out;
}

bool FeatureMatrix::operator==(const FeatureMatrix& other) const {
  // Bitwise so that NaN cells compare equal.
  return row_ids_ == other.row_ids_ && columns_ == other.columns_ &&
         values_.size() == other.values_.size() &&
         std::memcmp(values_.data(), other.values_.data(),
                     values_.size() * sizeof(double)) == 0;
}

void WriteFeatureMatrix(const FeatureMatrix& m, std::ostream& out) {
  internal::BinaryWriter w(out);
  w.Magic(std::string_view("CLTVMAT\0", 8));
  w.U32(kMatrixFileVersion);
  w.U64(m.rows());
  w.U32(static_cast<uint32_t>(m.cols()));
  for (const ColumnSpec& c : m.columns()) {
    w.String(c.name);
    w.U8(static_cast<uint8_t>(c.kind));
    w.U32(static_cast<uint32_t>(c.categories.size()));
    for (const std::string& cat : c.categories) w.String(cat);
  }
  for (const std::string& id : m.row_ids()) w.String(id);
  for (size_t c = 0; c < m.cols(); ++c) {
    for (double v : m.column(c)) w.F64(v);
  }
}

FeatureMatrix ReadFeatureMatrix(std::istream& in) {
  internal::BinaryReader r(in, "feature matrix");
  r.ExpectMagic(std::string_view("CLTVMAT\0", 8));
  if (r.U32() != kMatrixFileVersion) r.Fail("unsupported version");
  const uint64_t rows = r.U64();
  const uint32_t cols = r.U32();
  std::vector<ColumnSpec> columns(cols);
  for (ColumnSpec& c : columns) {
    c.name = r.String();
    const uint8_t kind = r.U8();
    if (kind > 2) r.Fail("bad column kind");
    c.kind = static_cast<ColumnKind>(kind);
    const uint32_t n = r.U32();
    for (uint32_t i = 0; i < n; ++i) c.categories.push_back(r.String());
  }
  std::vector<std::string> ids;
  ids.reserve(rows);
  for (uint64_t i = 0; i < rows; ++i) ids.push_back(r.String());
  FeatureMatrix m(std::move(ids), std::move(columns));
  for (size_t c = 0; c < m.cols(); ++c) {
    for (size_t row = 0; row < m.rows(); ++row) m.at(row, c) = r.F64();
  }
  r.ExpectEnd();
  return m;
}

void SaveFeatureMatrix(const FeatureMatrix& m, const std::filesystem::path& path) {
  internal::AtomicWrite(path, [&](std::ostream& out) { WriteFeatureMatrix(m, out); });
}

FeatureMatrix LoadFeatureMatrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open feature matrix " + path.string());
  return ReadFeatureMatrix(in);
}

}  // namespace cltv
