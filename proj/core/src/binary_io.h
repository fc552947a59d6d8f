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

#ifndef CLTV_SRC_BINARY_IO_H_
#define CLTV_SRC_BINARY_IO_H_

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

namespace cltv::internal {

// Little-endian fixed-width encoding for the versioned binary artifacts.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void Magic(std::string_view magic) { Raw(magic.data(), magic.size()); }
  void U8(uint8_t v) { Raw(&v, 1); }
  void U32(uint32_t v);
  void U64(uint64_t v);
  void I64(int64_t v) { U64(static_cast<uint64_t>(v)); }
  void F32(float v);
  void F64(double v);
  void String(std::string_view s);

 private:
  void Raw(const void* data, size_t n);
  std::ostream& out_;
};

class BinaryReader {
 public:
  BinaryReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

  // Throws DataError naming the artifact when the magic does not match.
  void ExpectMagic(std::string_view magic);
  uint8_t U8();
  uint32_t U32();
  uint64_t U64();
  int64_t I64() { return static_cast<int64_t>(U64()); }
  float F32();
  double F64();
  std::string String();
  // Throws unless the stream is exhausted.
  void ExpectEnd();
  [[noreturn]] void Fail(const std::string& why) const;

 private:
  void Raw(void* data, size_t n);
  std::istream& in_;
  std::string what_;
};

}  // namespace cltv::internal

#endif  // CLTV_SRC_BINARY_IO_H_
