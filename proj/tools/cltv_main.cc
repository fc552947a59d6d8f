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

// Command line front end for the pipeline subcommands.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "cltv/config.h"
#include "cltv/error.h"
#include "cltv/pipeline.h"

namespace {

constexpr int kExitConfig = static_cast<int>(cltv::ErrorKind::kConfig);
constexpr int kExitData = static_cast<int>(cltv::ErrorKind::kData);

const char* Describe(const std::string& name) {
  if (name == "datagen") return "Generate a synthetic event log";
  if (name == "features") return "Compute handcrafted features and labels";
  if (name == "embed") return "Train customer embeddings on product-view streams";
  if (name == "train") return "Fit the churn and percentile forests";
  if (name == "calibrate") return "Fit churn calibration and the percentile value map";
  if (name == "predict") return "Write calibrated predictions for the cohort";
  if (name == "evaluate") return "Score predictions on the test split";
  if (name == "rolling") return "Retrain over rolling windows with warm-started embeddings";
  if (name == "run") return "datagen, features, embed, train, calibrate, predict, evaluate";
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Customer lifetime value and churn pipeline"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<uint64_t> seed;
  bool deterministic = false;
  std::optional<std::string> artifacts;
  bool quiet = false;

  for (const std::string& name : cltv::SubcommandNames()) {
    CLI::App* sub = app.add_subcommand(name, Describe(name));
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--seed", seed, "Override the model and data seed");
    sub->add_flag("--deterministic", deterministic,
                  "Single-threaded embedding updates for byte-identical reruns");
    sub->add_option("--artifacts", artifacts, "Override the artifacts directory");
    sub->add_flag("-q,--quiet", quiet, "No progress output");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  try {
    cltv::RunOptions options;
    options.seed = seed;
    options.deterministic = deterministic;
    if (artifacts) options.artifacts_dir = std::filesystem::path(*artifacts);
    options.log = quiet ? nullptr : &std::cerr;
    const cltv::PipelineConfig config = cltv::PipelineConfig::Load(config_path);
    cltv::RunSubcommand(name, config, options);
  } catch (const cltv::Error& e) {
    std::cerr << "cltv " << name << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "cltv " << name << ": " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
