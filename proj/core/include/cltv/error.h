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

#ifndef CLTV_ERROR_H_
#define CLTV_ERROR_H_

#include <stdexcept>
#include <string>

namespace cltv {

// Failure classes surfaced to the CLI as distinct exit codes.
enum class ErrorKind {
  kConfig = 2,
  kMissingArtifact = 3,
  kData = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }
  int exit_code() const { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  // `field_path` is the dotted location inside the config document.
  ConfigError(const std::string& field_path, const std::string& message)
      : Error(ErrorKind::kConfig, field_path + ": " + message),
        field_path_(field_path) {}

  const std::string& field_path() const { return field_path_; }

 private:
  std::string field_path_;
};

class MissingArtifactError : public Error {
 public:
  MissingArtifactError(const std::string& artifact, const std::string& producer)
      : Error(ErrorKind::kMissingArtifact,
              "missing artifact '" + artifact + "'; run `cltv " + producer +
                  "` first"),
        producer_(producer) {}

  const std::string& producer() const { return producer_; }

 private:
  std::string producer_;
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message)
      : Error(ErrorKind::kData, message) {}
};

}  // namespace cltv

#endif  // CLTV_ERROR_H_
