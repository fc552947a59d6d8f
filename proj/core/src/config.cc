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

#include "cltv/config.h"

#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "cltv/artifacts.h"
#include "cltv/error.h"
#include "cltv/rng.h"
#include <nlohmann/json.hpp>

namespace cltv {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

// Reads one object, tracking which keys were consumed.
class Section {
 public:
  Section(const Json* j, std::string path) : j_(j), path_(std::move(path)) {
    if (j_ != nullptr && !j_->is_object()) throw ConfigError(Where(""), "must be an object");
  }

  std::string Where(const std::string& key) const {
    if (path_.empty()) return key;
    return key.empty() ? path_ : path_ + "." + key;
  }

  const Json* Find(const std::string& key) {
    seen_.insert(key);
    if (j_ == nullptr) return nullptr;
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  Section Child(const std::string& key) { return Section(Find(key), Where(key)); }

  void Get(const std::string& key, bool& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_boolean()) throw ConfigError(Where(key), "expected a boolean");
      out = v->get<bool>();
    }
  }
  void Get(const std::string& key, double& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number()) throw ConfigError(Where(key), "expected a number");
      out = v->get<double>();
    }
  }
  void Get(const std::string& key, int64_t& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number_integer()) throw ConfigError(Where(key), "expected an integer");
      out = v->get<int64_t>();
    }
  }
  void Get(const std::string& key, int& out) {
    int64_t wide = out;
    Get(key, wide);
    if (wide < INT32_MIN || wide > INT32_MAX) throw ConfigError(Where(key), "out of range");
    out = static_cast<int>(wide);
  }
  void Get(const std::string& key, uint64_t& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number_unsigned()) {
        throw ConfigError(Where(key), "expected a non-negative integer");
      }
      out = v->get<uint64_t>();
    }
  }
  void Get(const std::string& key, std::string& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_string()) throw ConfigError(Where(key), "expected a string");
      out = v->get<std::string>();
    }
  }
  void Get(const std::string& key, std::vector<int>& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_array()) throw ConfigError(Where(key), "expected an array of integers");
      out.clear();
      for (const Json& e : *v) {
        if (!e.is_number_integer()) throw ConfigError(Where(key), "expected integers");
        out.push_back(e.get<int>());
      }
    }
  }
  void GetOptional(const std::string& key, std::optional<double>& out) {
    if (const Json* v = Find(key)) {
      if (v->is_null()) {
        out.reset();
        return;
      }
      if (!v->is_number()) throw ConfigError(Where(key), "expected a number or null");
      out = v->get<double>();
    }
  }
  void GetTimestamp(const std::string& key, std::optional<Timestamp>& out) {
    if (const Json* v = Find(key)) {
      if (v->is_null()) {
        out.reset();
      } else if (v->is_number_integer()) {
        out = v->get<int64_t>();
      } else if (v->is_string()) {
        const auto ts = ParseTimestamp(v->get<std::string>());
        if (!ts) throw ConfigError(Where(key), "unparseable timestamp");
        out = *ts;
      } else {
        throw ConfigError(Where(key), "expected a date string, epoch seconds or null");
      }
    }
  }

  // Rejects keys that were never read.
  void Finish() const {
    if (j_ == nullptr) return;
    for (const auto& [key, value] : j_->items()) {
      if (!seen_.count(key)) throw ConfigError(Where(key), "unknown key");
    }
  }

 private:
  const Json* j_;
  std::string path_;
  std::set<std::string> seen_;
};

const char* SamplingName(const std::optional<FeatureSampling>& s) {
  if (!s) return "auto";
  switch (*s) {
    case FeatureSampling::kSqrt:
      return "sqrt";
    case FeatureSampling::kOneThird:
      return "one_third";
    case FeatureSampling::kAll:
      return "all";
  }
  return "auto";
}

// Re-raises a module's std::invalid_argument("field: message") under `section`.
template <typename F>
void Checked(const std::string& section, F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    const std::string what = e.what();
    const auto colon = what.find(": ");
    if (colon == std::string::npos) throw ConfigError(section, what);
    throw ConfigError(section + "." + what.substr(0, colon), what.substr(colon + 2));
  }
}

}  // namespace

PipelineConfig PipelineConfig::FromJson(const std::string& text,
                                        const std::filesystem::path& base_dir) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config", std::string("not valid JSON: ") + e.what());
  }
  PipelineConfig c;
  c.base_dir = base_dir;
  Section root(&doc, "");

  Section paths = root.Child("paths");
  paths.Get("events", c.events_path);
  paths.Get("artifacts", c.artifacts_dir);
  paths.Finish();

  root.Get("seed", c.seed);

  Section gen = root.Child("datagen");
  GenConfig& g = c.datagen;
  gen.Get("n_customers", g.n_customers);
  gen.Get("n_products", g.n_products);
  gen.Get("horizon_days", g.horizon_days);
  gen.Get("seed", g.seed);
  {
    std::optional<Timestamp> start = g.start;
    gen.GetTimestamp("start", start);
    if (!start) throw ConfigError("datagen.start", "must not be null");
    g.start = *start;
  }
  gen.Get("latent_value_spread", g.latent_value_spread);
  gen.Get("product_popularity_exponent", g.product_popularity_exponent);
  gen.Get("affinity_strength", g.affinity_strength);
  gen.Get("churn_fraction", g.churn_fraction);
  gen.Get("churn_value_slope", g.churn_value_slope);
  gen.Get("n_tiers", g.n_tiers);
  gen.Get("views_per_year", g.views_per_year);
  gen.Get("sessions_per_year", g.sessions_per_year);
  gen.Get("orders_per_year", g.orders_per_year);
  gen.Get("mean_item_value", g.mean_item_value);
  gen.Get("return_rate", g.return_rate);
  gen.Get("new_collection_fraction", g.new_collection_fraction);
  gen.Get("n_countries", g.n_countries);
  gen.Get("missing_age_fraction", g.missing_age_fraction);
  gen.Finish();

  Section split = root.Child("split");
  split.GetTimestamp("feature_start", c.split.feature_start);
  split.Get("feature_days", c.split.feature_days);
  split.Get("label_days", c.split.label_days);
  split.Finish();

  Section sgns = root.Child("sgns");
  SgnsConfig& s = c.sgns;
  sgns.Get("dim", s.dim);
  sgns.Get("window_length", s.window_length);
  sgns.Get("k_negatives", s.k_negatives);
  sgns.Get("eta", s.eta);
  sgns.Get("eta_floor", s.eta_floor);
  sgns.Get("epochs", s.epochs);
  sgns.Get("exponent", s.exponent);
  sgns.GetOptional("init_scale", s.init_scale);
  sgns.GetOptional("warm_init_scale", s.warm_init_scale);
  sgns.Get("threads", s.threads);
  sgns.Finish();

  Section forest = root.Child("forest");
  ForestConfig& f = c.forest;
  forest.Get("n_trees", f.n_trees);
  forest.Get("max_depth", f.max_depth);
  forest.Get("min_samples_leaf", f.min_samples_leaf);
  {
    std::string sampling = SamplingName(f.features_per_split);
    forest.Get("features_per_split", sampling);
    if (sampling == "auto") {
      f.features_per_split.reset();
    } else if (sampling == "sqrt") {
      f.features_per_split = FeatureSampling::kSqrt;
    } else if (sampling == "one_third") {
      f.features_per_split = FeatureSampling::kOneThird;
    } else if (sampling == "all") {
      f.features_per_split = FeatureSampling::kAll;
    } else {
      throw ConfigError("forest.features_per_split",
                        "expected one of auto, sqrt, one_third, all");
    }
  }
  forest.Get("bootstrap", f.bootstrap);
  forest.Get("threads", f.threads);
  forest.Finish();

  Section cv = root.Child("cv");
  cv.Get("enabled", c.cv.enabled);
  cv.Get("folds", c.cv.folds);
  cv.Get("max_depth_grid", c.cv.max_depth_grid);
  cv.Get("min_samples_leaf_grid", c.cv.min_samples_leaf_grid);
  cv.Get("sample_size", c.cv.sample_size);
  cv.Finish();

  Section cal = root.Child("calibration");
  cal.Get("fraction", c.calibration.fraction);
  cal.Get("logit_input", c.calibration.logit_input);
  cal.Get("value_map_depth", c.calibration.value_map_depth);
  cal.Get("value_map_min_leaf", c.calibration.value_map_min_leaf);
  cal.Finish();

  Section eval = root.Child("evaluation");
  eval.Get("test_size", c.evaluation.test_size);
  eval.Get("n_bins", c.evaluation.n_bins);
  eval.Get("uplift_seeds", c.evaluation.uplift_seeds);
  eval.Finish();

  Section mode = root.Child("mode");
  mode.Get("use_embeddings", c.mode.use_embeddings);
  mode.Get("warm_start", c.mode.warm_start);
  mode.Finish();

  Section rolling = root.Child("rolling");
  rolling.Get("n_periods", c.rolling.n_periods);
  rolling.Get("stride_days", c.rolling.stride_days);
  rolling.Finish();

  root.Finish();
  c.Validate();
  return c;
}

PipelineConfig PipelineConfig::Load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return FromJson(buf.str(), path.parent_path());
}

std::string PipelineConfig::ToJson() const {
  OrderedJson j;
  j["paths"] = {{"events", events_path}, {"artifacts", artifacts_dir}};
  j["seed"] = seed;
  const GenConfig& g = datagen;
  j["datagen"] = {{"n_customers", g.n_customers},
                  {"n_products", g.n_products},
                  {"horizon_days", g.horizon_days},
                  {"seed", g.seed},
                  {"start", g.start},
                  {"latent_value_spread", g.latent_value_spread},
                  {"product_popularity_exponent", g.product_popularity_exponent},
                  {"affinity_strength", g.affinity_strength},
                  {"churn_fraction", g.churn_fraction},
                  {"churn_value_slope", g.churn_value_slope},
                  {"n_tiers", g.n_tiers},
                  {"views_per_year", g.views_per_year},
                  {"sessions_per_year", g.sessions_per_year},
                  {"orders_per_year", g.orders_per_year},
                  {"mean_item_value", g.mean_item_value},
                  {"return_rate", g.return_rate},
                  {"new_collection_fraction", g.new_collection_fraction},
                  {"n_countries", g.n_countries},
                  {"missing_age_fraction", g.missing_age_fraction}};
  OrderedJson sp;
  sp["feature_start"] = split.feature_start ? OrderedJson(*split.feature_start) : OrderedJson();
  sp["feature_days"] = split.feature_days;
  sp["label_days"] = split.label_days;
  j["split"] = sp;
  const auto opt = [](const std::optional<double>& v) {
    return v ? OrderedJson(*v) : OrderedJson();
  };
  j["sgns"] = {{"dim", sgns.dim},
               {"window_length", sgns.window_length},
               {"k_negatives", sgns.k_negatives},
               {"eta", sgns.eta},
               {"eta_floor", sgns.eta_floor},
               {"epochs", sgns.epochs},
               {"exponent", sgns.exponent},
               {"init_scale", opt(sgns.init_scale)},
               {"warm_init_scale", opt(sgns.warm_init_scale)},
               {"threads", sgns.threads}};
  j["forest"] = {{"n_trees", forest.n_trees},
                 {"max_depth", forest.max_depth},
                 {"min_samples_leaf", forest.min_samples_leaf},
                 {"features_per_split", SamplingName(forest.features_per_split)},
                 {"bootstrap", forest.bootstrap},
                 {"threads", forest.threads}};
  j["cv"] = {{"enabled", cv.enabled},
             {"folds", cv.folds},
             {"max_depth_grid", cv.max_depth_grid},
             {"min_samples_leaf_grid", cv.min_samples_leaf_grid},
             {"sample_size", cv.sample_size}};
  j["calibration"] = {{"fraction", calibration.fraction},
                      {"logit_input", calibration.logit_input},
                      {"value_map_depth", calibration.value_map_depth},
                      {"value_map_min_leaf", calibration.value_map_min_leaf}};
  j["evaluation"] = {{"test_size", evaluation.test_size},
                     {"n_bins", evaluation.n_bins},
                     {"uplift_seeds", evaluation.uplift_seeds}};
  j["mode"] = {{"use_embeddings", mode.use_embeddings}, {"warm_start", mode.warm_start}};
  j["rolling"] = {{"n_periods", rolling.n_periods}, {"stride_days", rolling.stride_days}};
  return j.dump(2) + "\n";
}

std::string PipelineConfig::Hash() const { return Sha256Hex(ToJson()); }

void PipelineConfig::Validate() const {
  if (events_path.empty()) throw ConfigError("paths.events", "must not be empty");
  if (artifacts_dir.empty()) throw ConfigError("paths.artifacts", "must not be empty");
  const std::filesystem::path events_dir = EventsPath().parent_path();
  if (!events_dir.empty() && !std::filesystem::is_directory(events_dir)) {
    throw ConfigError("paths.events", "directory " + events_dir.string() + " does not exist");
  }
  const std::filesystem::path artifacts_parent = ArtifactsDir().parent_path();
  if (!artifacts_parent.empty() && !std::filesystem::is_directory(artifacts_parent)) {
    throw ConfigError("paths.artifacts",
                      "parent directory " + artifacts_parent.string() + " does not exist");
  }
  Checked("datagen", [&] { datagen.Validate(); });
  if (split.feature_days < 1) throw ConfigError("split.feature_days", "must be >= 1");
  if (split.label_days < 1) throw ConfigError("split.label_days", "must be >= 1");
  Checked("sgns", [&] { sgns.Validate(); });
  Checked("forest", [&] { forest.Validate(); });
  if (cv.folds < 2) throw ConfigError("cv.folds", "must be >= 2");
  if (cv.max_depth_grid.empty()) throw ConfigError("cv.max_depth_grid", "must not be empty");
  if (cv.min_samples_leaf_grid.empty()) {
    throw ConfigError("cv.min_samples_leaf_grid", "must not be empty");
  }
  for (int d : cv.max_depth_grid) {
    if (d < 0) throw ConfigError("cv.max_depth_grid", "depths must be >= 0");
  }
  for (int m : cv.min_samples_leaf_grid) {
    if (m < 1) throw ConfigError("cv.min_samples_leaf_grid", "leaf sizes must be >= 1");
  }
  if (cv.sample_size < 0) throw ConfigError("cv.sample_size", "must be >= 0");
  if (!(calibration.fraction > 0 && calibration.fraction < 1)) {
    throw ConfigError("calibration.fraction", "must be in (0, 1)");
  }
  if (calibration.value_map_depth < 0) {
    throw ConfigError("calibration.value_map_depth", "must be >= 0");
  }
  if (calibration.value_map_min_leaf < 1) {
    throw ConfigError("calibration.value_map_min_leaf", "must be >= 1");
  }
  if (evaluation.test_size < 1) throw ConfigError("evaluation.test_size", "must be >= 1");
  if (evaluation.n_bins < 1) throw ConfigError("evaluation.n_bins", "must be >= 1");
  if (evaluation.uplift_seeds != 0 && evaluation.uplift_seeds < 5) {
    throw ConfigError("evaluation.uplift_seeds", "must be 0 or >= 5");
  }
  if (rolling.n_periods < 1) throw ConfigError("rolling.n_periods", "must be >= 1");
  if (rolling.stride_days < 1) throw ConfigError("rolling.stride_days", "must be >= 1");
}

std::filesystem::path PipelineConfig::EventsPath() const {
  const std::filesystem::path p(events_path);
  return p.is_absolute() ? p : base_dir / p;
}

std::filesystem::path PipelineConfig::ArtifactsDir() const {
  const std::filesystem::path p(artifacts_dir);
  return p.is_absolute() ? p : base_dir / p;
}

TimeSplit PipelineConfig::ResolveSplit() const {
  const Timestamp start =
      split.feature_start.value_or(datagen.start + (datagen.horizon_days - split.feature_days -
                                                    split.label_days) *
                                                       kSecondsPerDay);
  try {
    return TimeSplit::FromStart(start, split.feature_days, split.label_days);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("split", e.what());
  }
}

SgnsConfig PipelineConfig::ResolvedSgns() const {
  SgnsConfig s = sgns;
  s.seed = MixSeed(seed, 0x5965);
  return s;
}

ForestConfig PipelineConfig::ResolvedForest() const {
  ForestConfig f = forest;
  f.seed = MixSeed(seed, 0xf0e5);
  return f;
}

bool PipelineConfig::operator==(const PipelineConfig& o) const {
  return events_path == o.events_path && artifacts_dir == o.artifacts_dir && seed == o.seed &&
         datagen == o.datagen && split == o.split && sgns == o.sgns && forest == o.forest &&
         cv == o.cv && calibration == o.calibration && evaluation == o.evaluation &&
         mode == o.mode && rolling == o.rolling;
}

}  // namespace cltv
