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

#ifndef CLTV_ARTIFACTS_H_
#define CLTV_ARTIFACTS_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

namespace cltv {

std::string Sha256Hex(std::string_view data);
// Throws DataError if the file cannot be read.
std::string Sha256File(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over `path`.
void AtomicWriteFile(const std::filesystem::path& path, std::string_view content);
std::string ReadFileBytes(const std::filesystem::path& path);

// Provenance record written next to every artifact a subcommand produces.
struct RunManifest {
  std::string subcommand;
  std::string config_hash;
  uint64_t seed = 0;
  bool deterministic = true;
  std::string started_at;
  std::string finished_at;
  // Relative artifact name -> sha256.
  std::map<std::string, std::string> inputs;
  std::map<std::string, std::string> outputs;
  // The resolved config document the run used.
  std::string config_json;
};

void WriteManifest(const RunManifest& manifest, const std::filesystem::path& path);
RunManifest ReadManifest(const std::filesystem::path& path);

}  // namespace cltv

#endif  // CLTV_ARTIFACTS_H_
