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

// Acceptance suite: one PASS/FAIL line per criterion. Pass criterion numbers
// as arguments to run a subset.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cltv/datagen.h"
#include "cltv/features.h"
#include "cltv/metrics.h"
#include "cltv/modeling.h"
#include "cltv/pairgen.h"
#include "cltv/pipeline.h"
#include "cltv/rng.h"
#include "cltv/sgns.h"
#include "cltv/uplift.h"
#include "oracles.h"

namespace {

namespace fs = std::filesystem;
using namespace cltv;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, ...) __attribute__((format(printf, 1, 2)));
std::string Fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// Random model with both matrices filled uniformly in [-scale, scale].
EmbeddingModel RandomModel(size_t rows, int dim, Rng& rng, double scale = 0.5,
                           const std::string& prefix = "c") {
  std::vector<std::string> ids;
  for (size_t i = 0; i < rows; ++i) ids.push_back(prefix + std::to_string(1000 + i));
  EmbeddingModel m(CustomerIndex(ids), dim);
  for (double& v : m.w_in()) v = UniformSymmetric(rng, scale);
  for (double& v : m.w_out()) v = UniformSymmetric(rng, scale);
  return m;
}

double Norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Outcome GradientCorrectness() {
  Rng rng(101);
  double worst = 0;
  const int instances = 200;
  for (int t = 0; t < instances; ++t) {
    const size_t rows = 2 + UniformIndex(rng, 9);
    const int dim = 1 + static_cast<int>(UniformIndex(rng, 8));
    EmbeddingModel model = RandomModel(rows, dim, rng);
    const TrainingPair pair{static_cast<uint32_t>(UniformIndex(rng, rows)),
                            static_cast<uint32_t>(UniformIndex(rng, rows))};
    std::vector<uint32_t> negatives(1 + UniformIndex(rng, 6));
    for (uint32_t& n : negatives) n = static_cast<uint32_t>(UniformIndex(rng, rows));

    std::vector<double*> coords;
    for (double& v : model.w_in()) coords.push_back(&v);
    for (double& v : model.w_out()) coords.push_back(&v);
    const std::vector<double> numeric = testing::CentralDifference(
        [&] { return EmbeddingLoss(model, pair, negatives); }, coords);

    EmbeddingModel stepped = model;
    const double eta = 1.0;
    SgdStep(stepped, pair, negatives, eta);
    std::vector<double> analytic;
    for (size_t i = 0; i < model.w_in().size(); ++i) {
      analytic.push_back((model.w_in()[i] - stepped.w_in()[i]) / eta);
    }
    for (size_t i = 0; i < model.w_out().size(); ++i) {
      analytic.push_back((model.w_out()[i] - stepped.w_out()[i]) / eta);
    }
    std::vector<double> diff(analytic.size());
    for (size_t i = 0; i < diff.size(); ++i) diff[i] = analytic[i] - numeric[i];
    const double scale = std::max({Norm(analytic), Norm(numeric), 1e-12});
    worst = std::max(worst, Norm(diff) / scale);
  }
  return {worst <= 1e-5,
          Fmt("%d random instances, max relative error %.2e (limit 1e-5)", instances, worst)};
}

Outcome PairGeneration() {
  const std::vector<uint32_t> example = {1, 2, 3};
  const std::vector<TrainingPair> pairs = GeneratePairs(example, 3);
  bool worked = false;
  for (size_t i = 0; i + 1 < pairs.size(); ++i) {
    if (pairs[i] == TrainingPair{2, 1} && pairs[i + 1] == TrainingPair{2, 3}) worked = true;
  }
  // Centre C2 yields exactly (C2,C1) and (C2,C3).
  std::vector<TrainingPair> centre2;
  for (const TrainingPair& p : pairs) {
    if (p.in == 2) centre2.push_back(p);
  }
  worked = worked && centre2 == std::vector<TrainingPair>{{2, 1}, {2, 3}};

  Rng rng(202);
  int mismatches = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<uint32_t> stream(UniformIndex(rng, 51));
    const size_t alphabet = 1 + UniformIndex(rng, 30);
    for (uint32_t& c : stream) c = static_cast<uint32_t>(UniformIndex(rng, alphabet));
    const int window = 3 + 2 * static_cast<int>(UniformIndex(rng, 5));
    std::vector<std::pair<uint32_t, uint32_t>> got;
    for (const TrainingPair& p : GeneratePairs(stream, window)) got.emplace_back(p.in, p.out);
    auto want = testing::BruteForcePairs(stream, window);
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    if (got != want) ++mismatches;
  }
  return {worked && mismatches == 0,
          Fmt("worked example %s, %d/1000 random streams differ from brute force",
              worked ? "matches" : "DIFFERS", mismatches)};
}

Outcome NegativeTableCorrectness() {
  const std::vector<uint64_t> counts = {16, 1};
  const NegativeTable table(counts, 0.75);
  const double pa = table.Probability(0), pb = table.Probability(1);
  const bool exact = pa == 8.0 / 9.0 && pb == 1.0 / 9.0;
  Rng rng(303);
  const int draws = 1000000;
  int a = 0;
  for (int i = 0; i < draws; ++i) a += table.Draw(rng) == 0;
  const double fa = static_cast<double>(a) / draws;
  const double dev = std::max(std::abs(fa - 8.0 / 9.0), std::abs((1 - fa) - 1.0 / 9.0));
  return {exact && dev <= 0.005,
          Fmt("P = (%.17g, %.17g) %s; empirical A %.5f, max deviation %.5f (limit 0.005)", pa,
              pb, exact ? "exact" : "NOT exact", fa, dev)};
}

Outcome MetricOracles() {
  Rng rng(404);
  double worst_auc = 0, worst_sp = 0, worst_rmse = 0;
  for (int t = 0; t < 100; ++t) {
    const size_t n = 2 + UniformIndex(rng, 499);
    std::vector<double> s(n), x(n), y(n), p(n), a(n);
    std::vector<bool> lab(n);
    const double levels = static_cast<double>(1 + UniformIndex(rng, 20));
    for (size_t i = 0; i < n; ++i) {
      s[i] = std::floor(UniformUnit(rng) * levels);
      lab[i] = UniformUnit(rng) < 0.4;
      x[i] = std::floor(UniformUnit(rng) * levels);
      y[i] = x[i] + std::floor(UniformUnit(rng) * 3);
      p[i] = UniformUnit(rng) * 10;
      a[i] = UniformUnit(rng) * 10;
    }
    lab[0] = true;
    lab[1] = false;
    worst_auc = std::max(worst_auc, std::abs(Auc(s, lab) - testing::PairwiseAuc(s, lab)));
    if (levels > 1) {
      x[0] = 0;
      x[1] = levels;
      y[0] = 0;
      y[1] = levels + 5;
      worst_sp = std::max(worst_sp, std::abs(Spearman(x, y) - testing::NaiveSpearman(x, y)));
    }
    worst_rmse = std::max(worst_rmse, std::abs(Rmse(p, a) - testing::NaiveRmse(p, a)));
  }
  const double worst = std::max({worst_auc, worst_sp, worst_rmse});
  return {worst <= 1e-12, Fmt("max |diff| AUC %.1e, Spearman %.1e, RMSE %.1e (limit 1e-12)",
                              worst_auc, worst_sp, worst_rmse)};
}

// Largest least-squares residual of each new customer's input row against the
// span of `basis` rows.
double SpanResidual(const std::vector<std::vector<double>>& basis,
                    const std::vector<std::vector<double>>& vectors) {
  const auto dim = static_cast<Eigen::Index>(vectors.front().size());
  Eigen::MatrixXd a(dim, static_cast<Eigen::Index>(basis.size()));
  for (size_t j = 0; j < basis.size(); ++j) {
    for (Eigen::Index d = 0; d < dim; ++d) a(d, static_cast<Eigen::Index>(j)) = basis[j][d];
  }
  const auto qr = a.colPivHouseholderQr();
  double worst = 0;
  for (const auto& v : vectors) {
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
    const Eigen::VectorXd x = qr.solve(b);
    worst = std::max(worst, (a * x - b).norm());
  }
  return worst;
}

Outcome WarmStartSpan() {
  Rng rng(505);
  double worst = 0, worst_small = 0;
  bool moved = true;
  for (int t = 0; t < 50; ++t) {
    for (bool small_old : {false, true}) {
      const int dim = 2 + static_cast<int>(UniformIndex(rng, 7));
      const size_t n_old = small_old ? 1 + UniformIndex(rng, static_cast<size_t>(dim - 1))
                                     : static_cast<size_t>(dim) + UniformIndex(rng, 4);
      const size_t n_new = 1 + UniformIndex(rng, 4);
      const EmbeddingModel prior = RandomModel(n_old, dim, rng, 0.5, "o");
      std::vector<std::string> ids = prior.index().ids();
      for (size_t i = 0; i < n_new; ++i) ids.push_back("n" + std::to_string(i));
      const CustomerIndex index(ids);
      const CohortMap cohorts = CohortMap::FromIndices(prior.index(), index);
      SgnsConfig config;
      config.dim = dim;
      config.warm_init_scale = 0.0;
      config.epochs = 3;
      config.k_negatives = 3;
      config.eta = 0.1;
      config.seed = static_cast<uint64_t>(t);
      EmbeddingModel model = WarmStartInit(prior, cohorts, config);
      const std::vector<bool> old = cohorts.OldMask(index);
      std::vector<uint32_t> old_rows, new_rows;
      for (uint32_t r = 0; r < index.size(); ++r) (old[r] ? old_rows : new_rows).push_back(r);
      std::vector<std::vector<double>> initial_old_out;
      for (uint32_t r : old_rows) {
        const auto row = model.out_row(r);
        initial_old_out.emplace_back(row.begin(), row.end());
      }
      // Only old customers are sampleable as negatives.
      std::vector<uint64_t> counts(index.size(), 0);
      for (uint32_t r : old_rows) counts[r] = 1 + UniformIndex(rng, 5);
      const NegativeTable table(counts, 0.75);
      std::vector<TrainingPair> pairs;
      for (int i = 0; i < 40; ++i) {
        pairs.push_back({new_rows[UniformIndex(rng, new_rows.size())],
                         old_rows[UniformIndex(rng, old_rows.size())]});
      }
      Train(pairs, model, table, config, &cohorts);
      std::vector<std::vector<double>> new_in, final_old_out;
      for (uint32_t r : new_rows) {
        const auto row = model.in_row(r);
        new_in.emplace_back(row.begin(), row.end());
        if (Norm(new_in.back()) == 0) moved = false;
      }
      for (uint32_t r : old_rows) {
        const auto row = model.out_row(r);
        final_old_out.emplace_back(row.begin(), row.end());
      }
      if (small_old) {
        worst_small = std::max(worst_small, SpanResidual(initial_old_out, new_in));
      } else {
        worst = std::max(worst, SpanResidual(final_old_out, new_in));
      }
    }
  }
  return {moved && worst <= 1e-8 && worst_small <= 1e-8,
          Fmt("max residual %.1e with |C_old| >= n, %.1e with |C_old| < n against the "
              "initial old output rows (limit 1e-8)",
              worst, worst_small)};
}

// The cold comparator retrains on the prior's own window, which can only favour
// it; the warm run sees the window shifted by 30 days.
Outcome DriftDiagnostic() {
  int warm_wins = 0;
  double corr_sum = 0, corr_max = 0, warm_sum = 0, cold_sum = 0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    GenConfig gen;
    gen.n_customers = 2000;
    gen.horizon_days = 395;
    gen.seed = 600 + static_cast<uint64_t>(s);
    const EventLog events = Generate(gen).events;
    const TimeSplit a = TimeSplit::FromStart(gen.start, 365, 0);
    const TimeSplit b = TimeSplit::FromStart(gen.start + 30 * kSecondsPerDay, 365, 0);
    SgnsConfig config;
    config.seed = MixSeed(gen.seed, 1);
    const EmbeddingRun prior = TrainEmbeddings(events, a, config);
    config.seed = MixSeed(gen.seed, 2);
    const EmbeddingRun cold = TrainEmbeddings(events, a, config);
    const std::vector<std::string>& all = prior.model.index().ids();
    const double corr = MeanAbsDimensionCorrelation(prior.model, cold.model, all);

    config.seed = MixSeed(gen.seed, 3);
    const EmbeddingRun warm = TrainEmbeddings(events, b, config, &prior.model);
    const std::vector<std::string> old(warm.cohorts->old_customers.begin(),
                                       warm.cohorts->old_customers.end());
    const double warm_cos = MeanRowCosine(prior.model, warm.model, old);
    const double cold_cos = MeanRowCosine(prior.model, cold.model, old);
    warm_wins += warm_cos > cold_cos;
    corr_sum += corr;
    corr_max = std::max(corr_max, corr);
    warm_sum += warm_cos;
    cold_sum += cold_cos;
  }
  return {corr_max < 0.3 && warm_wins >= 9,
          Fmt("cold/cold |corr| mean %.3f max %.3f (limit 0.3); warm cosine %.3f vs cold %.3f, "
              "warm higher in %d/10 seeds (need 9)",
              corr_sum / seeds, corr_max, warm_sum / seeds, cold_sum / seeds, warm_wins)};
}

Outcome EmbeddingUplift() {
  UpliftConfig config;
  config.n_seeds = 10;
  GenConfig high;
  const EventLog high_events = Generate(high).events;
  const TimeSplit split = TimeSplit::FromStart(high.start);
  const UpliftResult with_signal = RunUpliftExperiment(high_events, split, config);
  GenConfig none;
  none.affinity_strength = 0.0;
  const EventLog flat_events = Generate(none).events;
  const UpliftResult without = RunUpliftExperiment(flat_events, split, config);
  const TInterval& h = with_signal.interval;
  const TInterval& z = without.interval;
  const bool pass = h.lower > 0 && z.lower <= 0 && z.upper >= 0;
  return {pass, Fmt("affinity 0.9: uplift %.4f, 95%% CI [%.4f, %.4f]; affinity 0: uplift %.4f, "
                    "95%% CI [%.4f, %.4f]",
                    h.mean, h.lower, h.upper, z.mean, z.lower, z.upper)};
}

Outcome Calibration() {
  int ece_ok = 0, aggregate_ok = 0;
  double ece_before = 0, ece_after = 0, worst_aggregate = 0;
  const int seeds = 10;
  for (int s = 0; s < seeds; ++s) {
    GenConfig gen;
    gen.seed = 800 + static_cast<uint64_t>(s);
    const EventLog events = Generate(gen).events;
    const TimeSplit split = TimeSplit::FromStart(gen.start);
    const LabeledDataset data = BuildLabeledDataset(events, split);
    PipelineConfig config;
    config.seed = gen.seed;
    const RoleSplit roles = AssignRoles(data.x.rows(), 2000, 0.2, config.seed);
    ModelBundle bundle = FitBundle(data.SelectRows(roles.fit), config);
    bundle.calibration =
        FitCalibration(bundle, data.SelectRows(roles.calibration), config.calibration);
    const LabeledDataset test = data.SelectRows(roles.test);
    const MetricReport report = EvaluatePredictions(PredictAll(bundle, test.x), test, 10);
    const double before = report.extra.at("ece_raw");
    const double after = report.extra.at("ece_calibrated");
    const double aggregate = report.extra.at("cltv_relative_error_mapped");
    ece_ok += after <= before;
    aggregate_ok += aggregate <= 0.05;
    ece_before += before / seeds;
    ece_after += after / seeds;
    worst_aggregate = std::max(worst_aggregate, aggregate);
  }
  return {ece_ok >= 8 && aggregate_ok >= 8,
          Fmt("ECE after <= before in %d/10 seeds (mean %.4f -> %.4f); aggregate CLTV within "
              "5%% in %d/10 seeds (worst %.2f%%); need 8 each",
              ece_ok, ece_before, ece_after, aggregate_ok, 100 * worst_aggregate)};
}

std::vector<std::pair<std::string, std::string>> ArtifactBytes(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().lexically_relative(dir).string();
    if (name.size() >= 14 && name.ends_with(".manifest.json")) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    out.emplace_back(name, std::string(std::istreambuf_iterator<char>(in), {}));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() / "cltv_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::vector<std::pair<std::string, std::string>>> runs;
  for (int r = 0; r < 2; ++r) {
    const fs::path dir = root / ("run" + std::to_string(r));
    fs::create_directories(dir);
    PipelineConfig config = PipelineConfig::FromJson(
        R"({"paths": {"events": "events.ndjson", "artifacts": "."}, "seed": 42})", dir);
    RunOptions options;
    options.deterministic = true;
    RunSubcommand("run", config, options);
    runs.push_back(ArtifactBytes(dir));
  }
  size_t differing = 0;
  std::string first_diff;
  const auto& a = runs[0];
  const auto& b = runs[1];
  if (a.size() != b.size()) differing = std::max(a.size(), b.size());
  for (size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] != b[i]) {
      ++differing;
      if (first_diff.empty()) first_diff = a[i].first;
    }
  }
  fs::remove_all(root);
  return {differing == 0 && a.size() >= 10,
          Fmt("%zu artifacts compared, %zu differ%s%s", a.size(), differing,
              first_diff.empty() ? "" : ", first: ", first_diff.c_str())};
}

Outcome NoLeakage() {
  GenConfig gen;
  gen.n_customers = 1500;
  gen.seed = 1001;
  const EventLog events = Generate(gen).events;
  const TimeSplit split = TimeSplit::FromStart(gen.start);
  EventLog augmented = events;
  Rng rng(1002);
  std::vector<std::string> customers;
  for (const CustomerEvent& e : events) customers.push_back(e.customer_id);
  std::sort(customers.begin(), customers.end());
  customers.erase(std::unique(customers.begin(), customers.end()), customers.end());
  for (int i = 0; i < 20; ++i) customers.push_back("late" + std::to_string(i));
  size_t added = 0;
  for (int i = 0; i < 20000; ++i) {
    CustomerEvent e;
    e.customer_id = customers[UniformIndex(rng, customers.size())];
    // From exactly the window end up to two years later.
    e.ts = split.feature_end() + static_cast<Timestamp>(UniformIndex(rng, 730 * 86400));
    e.product_id = "p" + std::to_string(UniformIndex(rng, 500));
    switch (UniformIndex(rng, 4)) {
      case 0:
        e.kind = EventKind::kProductView;
        break;
      case 1:
        e.kind = EventKind::kSessionStart;
        e.product_id.clear();
        e.attrs["country"] = "zz";
        break;
      default: {
        e.kind = EventKind::kOrderPlaced;
        e.value = 10 + UniformUnit(rng) * 100;
        CustomerEvent ret = e;
        ret.kind = EventKind::kItemReturned;
        ret.ts += 86400;
        augmented.push_back(ret);
        ++added;
        break;
      }
    }
    augmented.push_back(e);
    ++added;
  }
  ValidateEventLog(augmented);
  Rng shuffle(1003);
  Shuffle(augmented.begin(), augmented.end(), shuffle);

  const auto before = ComputeFeatures(events, split);
  const auto after = ComputeFeatures(augmented, split);
  size_t changed_features = before.size() == after.size() ? 0 : 1;
  for (size_t i = 0; i < std::min(before.size(), after.size()); ++i) {
    for (const NumericFeature& f : kNumericFeatures) {
      const double x = before[i].*(f.field), y = after[i].*(f.field);
      if (!(x == y || (std::isnan(x) && std::isnan(y)))) ++changed_features;
    }
    if (before[i].country != after[i].country) ++changed_features;
  }
  auto named = [&](const EventLog& log) {
    const ViewStreams streams = BuildViewStreams(log, split);
    std::vector<std::pair<std::string, std::string>> out;
    for (const TrainingPair& p : GenerateAllPairs(streams, 11)) {
      out.emplace_back(streams.index.id(p.in), streams.index.id(p.out));
    }
    return out;
  };
  const auto pairs_before = named(events);
  const bool pairs_same = pairs_before == named(augmented);
  const LeakageAudit audit = AuditNoLeakage(augmented, split, 11);
  return {changed_features == 0 && pairs_same && audit.passed,
          Fmt("%zu post-window events appended; %zu feature values changed, %zu pairs %s, "
              "runtime audit %s",
              added, changed_features, pairs_before.size(),
              pairs_same ? "unchanged" : "CHANGED", audit.passed ? "passed" : "FAILED")};
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "gradient correctness", 5, GradientCorrectness},
      {2, "pair-generation fidelity", 10, PairGeneration},
      {3, "negative-table correctness", 10, NegativeTableCorrectness},
      {4, "metric oracles", 30, MetricOracles},
      {5, "warm-start span property", 5, WarmStartSpan},
      {6, "embedding drift diagnostic", 120, DriftDiagnostic},
      {7, "embedding uplift", 600, EmbeddingUplift},
      {8, "calibration", 300, Calibration},
      {9, "determinism", 300, Determinism},
      {10, "no-leakage audit", 60, NoLeakage},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = outcome.pass && in_time;
    failures += !pass;
    std::printf("[%s] criterion %d %s: %s; %.1f s (budget %.0f s%s)\n", pass ? "PASS" : "FAIL",
                c.id, c.name, outcome.detail.c_str(), seconds, c.budget_seconds,
                in_time ? "" : ", EXCEEDED");
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
