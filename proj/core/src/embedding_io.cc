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

#include "cltv/embedding_io.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "artifacts_internal.h"
#include "binary_io.h"
#include "cltv/error.h"

namespace cltv {

void WriteEmbeddingModel(const EmbeddingModel& model, std::ostream& out) {
  internal::BinaryWriter w(out);
  w.Magic(std::string_view("CLTVEMB\0", 8));
  w.U32(kEmbeddingFileVersion);
  w.U64(model.rows());
  w.U32(static_cast<uint32_t>(model.dim()));
  for (const std::string& id : model.index().ids()) w.String(id);
  for (double v : model.w_in()) w.F32(static_cast<float>(v));
  for (double v : model.w_out()) w.F32(static_cast<float>(v));
}

EmbeddingModel ReadEmbeddingModel(std::istream& in) {
  internal::BinaryReader r(in, "embedding model");
  r.ExpectMagic(std::string_view("CLTVEMB\0", 8));
  if (r.U32() != kEmbeddingFileVersion) r.Fail("unsupported version");
  const uint64_t rows = r.U64();
  const uint32_t dim = r.U32();
  if (dim == 0 || rows > (1ull << 31)) r.Fail("implausible shape");
  std::vector<std::string> ids;
  ids.reserve(rows);
  for (uint64_t i = 0; i < rows; ++i) ids.push_back(r.String());
  CustomerIndex index(ids);
  if (index.size() != rows || index.ids() != ids) {
    r.Fail("customer ids must be unique and sorted");
  }
  EmbeddingModel model(std::move(index), static_cast<int>(dim));
  for (double& v : model.w_in()) v = r.F32();
  for (double& v : model.w_out()) v = r.F32();
  r.ExpectEnd();
  return model;
}

void SaveEmbeddingModel(const EmbeddingModel& model, const std::filesystem::path& path) {
  internal::AtomicWrite(path, [&](std::ostream& out) { WriteEmbeddingModel(model, out); });
}

EmbeddingModel LoadEmbeddingModel(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding model " + path.string());
  return ReadEmbeddingModel(in);
}

void WriteEmbeddingTsv(const EmbeddingTable& table, std::ostream& out) {
  out << "customer_id";
  for (const std::string& name : table.ColumnNames()) out << '\t' << name;
  out << '\n';
  char buf[32];
  for (size_t i = 0; i < table.ids.size(); ++i) {
    out << table.ids[i];
    for (double v : table.row(i)) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
}

EmbeddingTable ReadEmbeddingTsv(std::istream& in) {
  EmbeddingTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError("embedding TSV: missing header");
  {
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, '\t');
    if (field != "customer_id") throw DataError("embedding TSV: bad header");
    while (std::getline(ss, field, '\t')) ++table.dim;
  }
  size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::getline(ss, field, '\t');
    table.ids.push_back(field);
    int cols = 0;
    while (std::getline(ss, field, '\t')) {
      double v = 0;
      const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
      if (res.ec != std::errc() || res.ptr != field.data() + field.size()) {
        throw DataError("embedding TSV line " + std::to_string(line_no) +
                        ": bad value '" + field + "'");
      }
      table.values.push_back(v);
      ++cols;
    }
    if (cols != table.dim) {
      throw DataError("embedding TSV line " + std::to_string(line_no) +
                      ": expected " + std::to_string(table.dim) + " values");
    }
  }
  return table;
}

}  // namespace cltv
