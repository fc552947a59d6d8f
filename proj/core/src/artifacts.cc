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

#include "cltv/artifacts.h"

#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <memory>
#include <sstream>

#include "artifacts_internal.h"
#include "cltv/error.h"
#include <nlohmann/json.hpp>

namespace cltv {

namespace internal {

void AtomicWrite(const std::filesystem::path& path,
                 const std::function<void(std::ostream&)>& write) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    write(out);
    out.flush();
    if (!out) throw DataError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace internal

std::string Sha256Hex(std::string_view data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx.get(), data.data(), data.size());
  EVP_DigestFinal_ex(ctx.get(), digest.data(), &len);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xf];
  }
  return out;
}

std::string ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string Sha256File(const std::filesystem::path& path) {
  return Sha256Hex(ReadFileBytes(path));
}

void AtomicWriteFile(const std::filesystem::path& path, std::string_view content) {
  internal::AtomicWrite(path, [&](std::ostream& out) {
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
  });
}

void WriteManifest(const RunManifest& m, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["format"] = "cltv-manifest";
  j["version"] = 1;
  j["subcommand"] = m.subcommand;
  j["config_hash"] = m.config_hash;
  j["seed"] = m.seed;
  j["deterministic"] = m.deterministic;
  j["started_at"] = m.started_at;
  j["finished_at"] = m.finished_at;
  j["inputs"] = m.inputs;
  j["outputs"] = m.outputs;
  j["config"] = nlohmann::ordered_json::parse(m.config_json);
  AtomicWriteFile(path, j.dump(2) + "\n");
}

RunManifest ReadManifest(const std::filesystem::path& path) {
  const auto j = nlohmann::ordered_json::parse(ReadFileBytes(path));
  RunManifest m;
  m.subcommand = j.at("subcommand").get<std::string>();
  m.config_hash = j.at("config_hash").get<std::string>();
  m.seed = j.at("seed").get<uint64_t>();
  m.deterministic = j.at("deterministic").get<bool>();
  m.started_at = j.at("started_at").get<std::string>();
  m.finished_at = j.at("finished_at").get<std::string>();
  m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
  m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  m.config_json = j.at("config").dump();
  return m;
}

}  // namespace cltv
