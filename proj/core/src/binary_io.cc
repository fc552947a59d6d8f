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

#include "binary_io.h"

#include <bit>
#include <cstring>

#include "cltv/error.h"

namespace cltv::internal {

static_assert(std::endian::native == std::endian::little,
              "binary artifacts assume a little-endian host");

void BinaryWriter::Raw(const void* data, size_t n) {
  out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}
void BinaryWriter::U32(uint32_t v) { Raw(&v, sizeof v); }
void BinaryWriter::U64(uint64_t v) { Raw(&v, sizeof v); }
void BinaryWriter::F32(float v) { Raw(&v, sizeof v); }
void BinaryWriter::F64(double v) { Raw(&v, sizeof v); }
void BinaryWriter::String(std::string_view s) {
  U32(static_cast<uint32_t>(s.size()));
  Raw(s.data(), s.size());
}

void BinaryReader::Fail(const std::string& why) const {
  throw DataError(what_ + ": " + why);
}

void BinaryReader::Raw(void* data, size_t n) {
  in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
  if (static_cast<size_t>(in_.gcount()) != n) Fail("truncated file");
}

void BinaryReader::ExpectMagic(std::string_view magic) {
  std::string got(magic.size(), '\0');
  Raw(got.data(), got.size());
  if (got != magic) Fail("bad magic bytes");
}

uint8_t BinaryReader::U8() {
  uint8_t v;
  Raw(&v, 1);
  return v;
}
uint32_t BinaryReader::U32() {
  uint32_t v;
  Raw(&v, sizeof v);
  return v;
}
uint64_t BinaryReader::U64() {
  uint64_t v;
  Raw(&v, sizeof v);
  return v;
}
float BinaryReader::F32() {
  float v;
  Raw(&v, sizeof v);
  return v;
}
double BinaryReader::F64() {
  double v;
  Raw(&v, sizeof v);
  return v;
}
std::string BinaryReader::String() {
  const uint32_t n = U32();
  if (n > (1u << 24)) Fail("implausible string length");
  std::string s(n, '\0');
  Raw(s.data(), n);
  return s;
}

void BinaryReader::ExpectEnd() {
  if (in_.peek() != std::char_traits<char>::eof()) Fail("trailing bytes");
}

}  // namespace cltv::internal
