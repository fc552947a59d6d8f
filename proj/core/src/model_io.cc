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

#include "cltv/model_io.h"

#include <fstream>
#include <sstream>

#include "artifacts_internal.h"
#include "binary_io.h"
#include "cltv/error.h"
#include <nlohmann/json.hpp>

namespace cltv {

namespace {

using internal::BinaryReader;
using internal::BinaryWriter;

constexpr std::string_view kMagic{"CLTVMDL\0", 8};

void WriteTree(const DecisionTree& tree, BinaryWriter& w) {
  w.U32(static_cast<uint32_t>(tree.nodes().size()));
  for (const TreeNode& n : tree.nodes()) {
    w.U32(static_cast<uint32_t>(n.feature));
    w.F64(n.threshold);
    w.U64(n.left_categories);
    w.U64(n.known_categories);
    w.U8(n.missing_left ? 1 : 0);
    w.U32(static_cast<uint32_t>(n.left));
    w.U32(static_cast<uint32_t>(n.right));
    w.F64(n.value);
    w.F64(n.weight);
  }
}

DecisionTree ReadTree(BinaryReader& r) {
  const uint32_t count = r.U32();
  if (count == 0) r.Fail("empty tree");
  std::vector<TreeNode> nodes(count);
  for (TreeNode& n : nodes) {
    n.feature = static_cast<int32_t>(r.U32());
    n.threshold = r.F64();
    n.left_categories = r.U64();
    n.known_categories = r.U64();
    n.missing_left = r.U8() != 0;
    n.left = static_cast<int32_t>(r.U32());
    n.right = static_cast<int32_t>(r.U32());
    n.value = r.F64();
    n.weight = r.F64();
  }
  // Children must point forward so every node is reachable and traversal ends.
  for (size_t i = 0; i < nodes.size(); ++i) {
    const TreeNode& n = nodes[i];
    if (n.is_leaf()) continue;
    const auto ok = [&](int32_t c) { return c > static_cast<int32_t>(i) && c < static_cast<int32_t>(count); };
    if (!ok(n.left) || !ok(n.right)) r.Fail("corrupt tree links");
  }
  return DecisionTree(std::move(nodes));
}

void WriteForest(const ForestModel& m, BinaryWriter& w) {
  w.U8(static_cast<uint8_t>(m.task()));
  w.U32(static_cast<uint32_t>(m.columns().size()));
  for (const ColumnSpec& c : m.columns()) {
    w.String(c.name);
    w.U8(static_cast<uint8_t>(c.kind));
    w.U32(static_cast<uint32_t>(c.categories.size()));
    for (const std::string& s : c.categories) w.String(s);
  }
  for (double v : m.importances()) w.F64(v);
  w.U32(static_cast<uint32_t>(m.trees().size()));
  for (const DecisionTree& t : m.trees()) WriteTree(t, w);
}

ForestModel ReadForest(BinaryReader& r) {
  const uint8_t task = r.U8();
  if (task > 1) r.Fail("unknown task");
  std::vector<ColumnSpec> columns(r.U32());
  for (ColumnSpec& c : columns) {
    c.name = r.String();
    const uint8_t kind = r.U8();
    if (kind > 2) r.Fail("unknown column kind");
    c.kind = static_cast<ColumnKind>(kind);
    c.categories.resize(r.U32());
    for (std::string& s : c.categories) s = r.String();
  }
  std::vector<double> importances(columns.size());
  for (double& v : importances) v = r.F64();
  std::vector<DecisionTree> trees(r.U32());
  for (DecisionTree& t : trees) t = ReadTree(r);
  for (const DecisionTree& t : trees) {
    for (const TreeNode& n : t.nodes()) {
      if (n.feature >= static_cast<int32_t>(columns.size())) r.Fail("feature id out of range");
    }
  }
  return ForestModel(static_cast<Task>(task), std::move(columns), std::move(trees),
                     std::move(importances));
}

nlohmann::ordered_json NodeJson(const DecisionTree& tree, int32_t i,
                                const std::vector<ColumnSpec>& columns) {
  const TreeNode& n = tree.nodes()[static_cast<size_t>(i)];
  nlohmann::ordered_json j;
  j["weight"] = n.weight;
  j["value"] = n.value;
  if (n.is_leaf()) return j;
  const ColumnSpec& c = columns[static_cast<size_t>(n.feature)];
  j["feature"] = c.name;
  if (n.known_categories != 0) {
    auto left = nlohmann::ordered_json::array();
    for (size_t k = 0; k < c.categories.size() && k < 64; ++k) {
      if ((n.left_categories >> k) & 1u) left.push_back(c.categories[k]);
    }
    j["left_categories"] = left;
  } else {
    j["threshold"] = n.threshold;
  }
  j["missing"] = n.missing_left ? "left" : "right";
  j["left"] = NodeJson(tree, n.left, columns);
  j["right"] = NodeJson(tree, n.right, columns);
  return j;
}

}  // namespace

void WriteModelBundle(const ModelBundle& bundle, std::ostream& out) {
  BinaryWriter w(out);
  w.Magic(kMagic);
  w.U32(kModelFileVersion);
  WriteForest(bundle.churn, w);
  WriteForest(bundle.percentile, w);
  w.U8(bundle.calibration ? 1 : 0);
  if (bundle.calibration) {
    const PlattModel& p = bundle.calibration->platt;
    w.F64(p.a);
    w.F64(p.b);
    w.U8(p.logit_input ? 1 : 0);
    w.U32(static_cast<uint32_t>(p.iterations));
    w.U8(p.converged ? 1 : 0);
    WriteTree(bundle.calibration->value_map.tree(), w);
  }
}

ModelBundle ReadModelBundle(std::istream& in) {
  BinaryReader r(in, "model bundle");
  r.ExpectMagic(kMagic);
  const uint32_t version = r.U32();
  if (version != kModelFileVersion) {
    r.Fail("unsupported version " + std::to_string(version));
  }
  ModelBundle bundle;
  bundle.churn = ReadForest(r);
  bundle.percentile = ReadForest(r);
  if (r.U8() != 0) {
    CalibrationModel c;
    c.platt.a = r.F64();
    c.platt.b = r.F64();
    c.platt.logit_input = r.U8() != 0;
    c.platt.iterations = static_cast<int>(r.U32());
    c.platt.converged = r.U8() != 0;
    c.value_map = PercentileValueMap(ReadTree(r));
    bundle.calibration = c;
  }
  r.ExpectEnd();
  return bundle;
}

void SaveModelBundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  internal::AtomicWrite(path, [&](std::ostream& out) { WriteModelBundle(bundle, out); });
}

ModelBundle LoadModelBundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadModelBundle(in);
}

std::string ForestDebugJson(const ForestModel& model, size_t max_trees) {
  nlohmann::ordered_json j;
  j["task"] = model.task() == Task::kChurnClassifier ? "churn_classifier"
                                                     : "percentile_regressor";
  j["n_trees"] = model.trees().size();
  j["importances"] = nlohmann::ordered_json::object();
  for (const auto& [name, w] : RankedImportance(model)) j["importances"][name] = w;
  j["trees"] = nlohmann::ordered_json::array();
  for (size_t t = 0; t < model.trees().size() && t < max_trees; ++t) {
    j["trees"].push_back(NodeJson(model.trees()[t], 0, model.columns()));
  }
  return j.dump(2) + "\n";
}

}  // namespace cltv
