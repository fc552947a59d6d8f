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

#ifndef CLTV_EMBEDDING_IO_H_
#define CLTV_EMBEDDING_IO_H_

#include <filesystem>
#include <iosfwd>

#include "cltv/sgns.h"

namespace cltv {

// Binary layout, little-endian:
//   "CLTVEMB\0" | u32 version | u64 rows | u32 dim
//   rows x (u32 length, bytes)            customer ids in row order
//   rows*dim f32                          W_in, row-major
//   rows*dim f32                          W_out, row-major
// Values are stored as 32-bit floats, so a reload equals the float-rounded
// model.
inline constexpr uint32_t kEmbeddingFileVersion = 1;

void WriteEmbeddingModel(const EmbeddingModel& model, std::ostream& out);
EmbeddingModel ReadEmbeddingModel(std::istream& in);
void SaveEmbeddingModel(const EmbeddingModel& model, const std::filesystem::path& path);
EmbeddingModel LoadEmbeddingModel(const std::filesystem::path& path);

// "customer_id<TAB>v0<TAB>...<TAB>v{n-1}" per line with a header row. Values are
// printed with 17 significant digits and reload bit-exactly.
void WriteEmbeddingTsv(const EmbeddingTable& table, std::ostream& out);
EmbeddingTable ReadEmbeddingTsv(std::istream& in);

}  // namespace cltv

#endif  // CLTV_EMBEDDING_IO_H_
