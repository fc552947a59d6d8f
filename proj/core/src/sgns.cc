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

#include "cltv/sgns.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "cltv/rng.h"

namespace cltv {

void SgnsConfig::Validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
  };
  require(dim >= 1, "dim", "must be >= 1");
  require(window_length >= 3 && window_length % 2 == 1, "window_length",
          "must be odd and >= 3");
  require(k_negatives >= 1, "k_negatives", "must be >= 1");
  require(eta > 0, "eta", "must be > 0");
  require(eta_floor >= 0 && eta_floor <= eta, "eta_floor", "must be in [0, eta]");
  require(epochs >= 1, "epochs", "must be >= 1");
  require(std::isfinite(exponent), "exponent", "must be finite");
  require(InitScale() > 0, "init_scale", "must be > 0");
  require(WarmInitScale() >= 0, "warm_init_scale", "must be >= 0");
  require(threads >= 1, "threads", "must be >= 1");
}

EmbeddingModel::EmbeddingModel(CustomerIndex index, int dim)
    : index_(std::move(index)),
      dim_(dim),
      w_in_(index_.size() * static_cast<size_t>(dim), 0.0),
      w_out_(index_.size() * static_cast<size_t>(dim), 0.0) {}

bool EmbeddingModel::AllFinite() const {
  auto finite = [](double v) { return std::isfinite(v); };
  return std::all_of(w_in_.begin(), w_in_.end(), finite) &&
         std::all_of(w_out_.begin(), w_out_.end(), finite);
}

CohortMap CohortMap::FromIndices(const CustomerIndex& prior,
                                 const CustomerIndex& current) {
  CohortMap map;
  for (const std::string& id : current.ids()) {
    (prior.Contains(id) ? map.old_customers : map.new_customers).insert(id);
  }
  return map;
}

std::vector<bool> CohortMap::OldMask(const CustomerIndex& index) const {
  if (old_customers.size() + new_customers.size() != index.size()) {
    throw std::invalid_argument("cohort map does not cover the model index");
  }
  std::vector<bool> mask(index.size(), false);
  for (const std::string& id : old_customers) {
    if (new_customers.contains(id)) {
      throw std::invalid_argument("customer is both old and new: " + id);
    }
    const int64_t row = index.Find(id);
    if (row < 0) throw std::invalid_argument("cohort customer not in index: " + id);
    mask[static_cast<size_t>(row)] = true;
  }
  for (const std::string& id : new_customers) {
    if (!index.Contains(id)) {
      throw std::invalid_argument("cohort customer not in index: " + id);
    }
  }
  return mask;
}

EmbeddingModel InitModel(const CustomerIndex& cohort, const SgnsConfig& config) {
  config.Validate();
  if (cohort.size() == 0) throw std::invalid_argument("empty cohort");
  EmbeddingModel model(cohort, config.dim);
  Rng rng(MixSeed(config.seed, 0x1417));
  const double scale = config.InitScale();
  for (double& v : model.w_in()) v = UniformSymmetric(rng, scale);
  return model;
}

EmbeddingModel WarmStartInit(const EmbeddingModel& prior, const CohortMap& cohorts,
                             const SgnsConfig& config) {
  config.Validate();
  if (prior.dim() != config.dim) {
    throw std::invalid_argument("prior model dimension differs from config.dim");
  }
  std::vector<std::string> ids(cohorts.old_customers.begin(),
                               cohorts.old_customers.end());
  ids.insert(ids.end(), cohorts.new_customers.begin(), cohorts.new_customers.end());
  EmbeddingModel model(CustomerIndex(std::move(ids)), config.dim);
  const std::vector<bool> old_mask = cohorts.OldMask(model.index());

  Rng rng(MixSeed(config.seed, 0x3a9f));
  const double scale = config.WarmInitScale();
  for (uint32_t row = 0; row < model.rows(); ++row) {
    if (old_mask[row]) {
      const int64_t src = prior.index().Find(model.index().id(row));
      if (src < 0) {
        throw std::invalid_argument("old customer missing from prior model: " +
                                    model.index().id(row));
      }
      const auto in = prior.in_row(static_cast<uint32_t>(src));
      const auto out = prior.out_row(static_cast<uint32_t>(src));
      std::copy(in.begin(), in.end(), model.in_row(row).begin());
      std::copy(out.begin(), out.end(), model.out_row(row).begin());
    } else {
      for (double& v : model.in_row(row)) v = UniformSymmetric(rng, scale);
      for (double& v : model.out_row(row)) v = UniformSymmetric(rng, scale);
    }
  }
  return model;
}

namespace {

double Sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// log(sigmoid(x)) without overflow for large |x|.
double LogSigmoid(double x) {
  if (x >= 0) return -std::log1p(std::exp(-x));
  return x - std::log1p(std::exp(x));
}

// Relaxed atomics let concurrent updaters race on rows without undefined
// behaviour; the sequential instantiation compiles to plain loads and stores.
template <bool kConcurrent>
inline double Load(const double* p) {
  if constexpr (kConcurrent) {
    return std::atomic_ref<double>(*const_cast<double*>(p))
        .load(std::memory_order_relaxed);
  } else {
    return *p;
  }
}

template <bool kConcurrent>
inline void AddTo(double* p, double delta) {
  if constexpr (kConcurrent) {
    std::atomic_ref<double> ref(*p);
    ref.store(ref.load(std::memory_order_relaxed) + delta, std::memory_order_relaxed);
  } else {
    *p += delta;
  }
}

struct StepScratch {
  std::vector<double> grad_in;
  std::vector<double> coeff;
  std::vector<double> v_in;
};

template <bool kConcurrent>
double StepKernel(double* w_in, double* w_out, int dim, TrainingPair pair,
                  std::span<const uint32_t> negatives, double eta,
                  StepScratch& scratch) {
  const size_t n = static_cast<size_t>(dim);
  double* v_in = w_in + pair.in * n;
  scratch.v_in.resize(n);
  for (size_t d = 0; d < n; ++d) scratch.v_in[d] = Load<kConcurrent>(v_in + d);
  scratch.grad_in.assign(n, 0.0);
  scratch.coeff.resize(negatives.size() + 1);

  // Forward pass and input gradient, all against pre-update output rows.
  double loss = 0.0;
  for (size_t j = 0; j <= negatives.size(); ++j) {
    const uint32_t row = j == 0 ? pair.out : negatives[j - 1];
    const bool positive = row == pair.out;
    const double* v_out = w_out + row * n;
    double score = 0.0;
    for (size_t d = 0; d < n; ++d) score += Load<kConcurrent>(v_out + d) * scratch.v_in[d];
    const double g = Sigmoid(score) - (positive ? 1.0 : 0.0);
    loss -= positive ? LogSigmoid(score) : LogSigmoid(-score);
    scratch.coeff[j] = g;
    for (size_t d = 0; d < n; ++d) scratch.grad_in[d] += g * Load<kConcurrent>(v_out + d);
  }
  if (eta == 0.0) return loss;

  for (size_t j = 0; j <= negatives.size(); ++j) {
    const uint32_t row = j == 0 ? pair.out : negatives[j - 1];
    double* v_out = w_out + row * n;
    const double step = -eta * scratch.coeff[j];
    for (size_t d = 0; d < n; ++d) AddTo<kConcurrent>(v_out + d, step * scratch.v_in[d]);
  }
  for (size_t d = 0; d < n; ++d) AddTo<kConcurrent>(v_in + d, -eta * scratch.grad_in[d]);
  return loss;
}

thread_local StepScratch tls_scratch;

void CheckRows(const EmbeddingModel& model, TrainingPair pair,
               std::span<const uint32_t> negatives) {
  const size_t rows = model.rows();
  if (pair.in >= rows || pair.out >= rows) {
    throw std::out_of_range("training pair row outside the model");
  }
  for (uint32_t r : negatives) {
    if (r >= rows) throw std::out_of_range("negative row outside the model");
  }
}

}  // namespace

double SgdStep(EmbeddingModel& model, TrainingPair pair,
               std::span<const uint32_t> negatives, double eta) {
  CheckRows(model, pair, negatives);
  return StepKernel<false>(model.w_in().data(), model.w_out().data(), model.dim(),
                           pair, negatives, eta, tls_scratch);
}

double EmbeddingLoss(const EmbeddingModel& model, TrainingPair pair,
                     std::span<const uint32_t> negatives) {
  CheckRows(model, pair, negatives);
  const auto v_in = model.in_row(pair.in);
  double loss = 0.0;
  for (size_t j = 0; j <= negatives.size(); ++j) {
    const uint32_t row = j == 0 ? pair.out : negatives[j - 1];
    const auto v_out = model.out_row(row);
    double score = 0.0;
    for (size_t d = 0; d < v_in.size(); ++d) score += v_out[d] * v_in[d];
    loss -= row == pair.out ? LogSigmoid(score) : LogSigmoid(-score);
  }
  return loss;
}

int PairPhase(TrainingPair pair, const std::vector<bool>& old_mask) {
  const bool in_old = old_mask[pair.in];
  const bool out_old = old_mask[pair.out];
  if (in_old && out_old) return 0;
  if (!in_old && out_old) return 1;
  if (in_old) return 2;
  return 3;
}

TrainResult Train(std::span<const TrainingPair> pairs, EmbeddingModel& model,
                  const NegativeTable& table, const SgnsConfig& config,
                  const CohortMap* cohorts) {
  config.Validate();
  if (pairs.empty()) throw std::invalid_argument("no training pairs");
  if (model.dim() != config.dim) {
    throw std::invalid_argument("model dimension differs from config.dim");
  }
  for (const TrainingPair& p : pairs) {
    if (p.in >= model.rows() || p.out >= model.rows()) {
      throw std::out_of_range("training pair row outside the model");
    }
  }
  if (!table.rows().empty() && table.rows().back() >= model.rows()) {
    throw std::out_of_range("negative table row outside the model");
  }

  // Each phase is a list of pair positions; without cohorts there is one.
  std::vector<std::vector<uint32_t>> phases;
  if (cohorts != nullptr) {
    const std::vector<bool> old_mask = cohorts->OldMask(model.index());
    phases.resize(4);
    for (uint32_t i = 0; i < pairs.size(); ++i) {
      phases[static_cast<size_t>(PairPhase(pairs[i], old_mask))].push_back(i);
    }
  } else {
    phases.emplace_back(pairs.size());
    for (uint32_t i = 0; i < pairs.size(); ++i) phases[0][i] = i;
  }

  TrainResult result;
  const double total_steps = static_cast<double>(pairs.size()) * config.epochs;
  Rng order_rng(MixSeed(config.seed, 0x5eed));
  double* w_in = model.w_in().data();
  double* w_out = model.w_out().data();
  const int dim = model.dim();

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double epoch_loss = 0.0;
    for (auto& phase : phases) {
      Shuffle(phase.begin(), phase.end(), order_rng);
      const uint64_t phase_start = result.steps;
      auto eta_at = [&](uint64_t step) {
        const double progress = static_cast<double>(step) / total_steps;
        return config.eta - (config.eta - config.eta_floor) * progress;
      };

      if (config.threads == 1) {
        Rng rng(MixSeed(config.seed, (static_cast<uint64_t>(epoch) << 32) | phase_start));
        std::vector<uint32_t> negatives;
        for (size_t i = 0; i < phase.size(); ++i) {
          const TrainingPair pair = pairs[phase[i]];
          table.Sample(config.k_negatives, pair.out, rng, negatives);
          epoch_loss += StepKernel<false>(w_in, w_out, dim, pair, negatives,
                                          eta_at(phase_start + i), tls_scratch);
        }
      } else {
        const size_t shards = static_cast<size_t>(config.threads);
        std::vector<double> shard_loss(shards, 0.0);
        std::vector<std::thread> workers;
        for (size_t t = 0; t < shards; ++t) {
          workers.emplace_back([&, t] {
            const size_t lo = phase.size() * t / shards;
            const size_t hi = phase.size() * (t + 1) / shards;
            Rng rng(MixSeed(config.seed ^ (phase_start * shards + t), epoch));
            std::vector<uint32_t> negatives;
            StepScratch scratch;
            for (size_t i = lo; i < hi; ++i) {
              const TrainingPair pair = pairs[phase[i]];
              table.Sample(config.k_negatives, pair.out, rng, negatives);
              // Interleaved shards advance the schedule at the same rate.
              const uint64_t step = phase_start + (i - lo) * shards + t;
              shard_loss[t] += StepKernel<true>(w_in, w_out, dim, pair, negatives,
                                                eta_at(step), scratch);
            }
          });
        }
        for (auto& w : workers) w.join();
        for (double l : shard_loss) epoch_loss += l;
      }
      result.steps += phase.size();
    }
    result.epoch_loss.push_back(epoch_loss / static_cast<double>(pairs.size()));
  }
  return result;
}

std::vector<std::string> EmbeddingTable::ColumnNames() const {
  std::vector<std::string> names;
  for (int d = 0; d < dim; ++d) names.push_back("emb_" + std::to_string(d));
  return names;
}

EmbeddingTable ExportEmbeddings(const EmbeddingModel& model) {
  EmbeddingTable table;
  table.ids = model.index().ids();
  table.dim = model.dim();
  table.values = model.w_in();
  return table;
}

namespace {

std::vector<std::pair<uint32_t, uint32_t>> SharedRows(
    const EmbeddingModel& a, const EmbeddingModel& b,
    std::span<const std::string> ids) {
  if (a.dim() != b.dim()) throw std::invalid_argument("models differ in dimension");
  std::vector<std::pair<uint32_t, uint32_t>> rows;
  for (const std::string& id : ids) {
    const int64_t ra = a.index().Find(id);
    const int64_t rb = b.index().Find(id);
    if (ra >= 0 && rb >= 0) {
      rows.emplace_back(static_cast<uint32_t>(ra), static_cast<uint32_t>(rb));
    }
  }
  return rows;
}

}  // namespace

double MeanRowCosine(const EmbeddingModel& a, const EmbeddingModel& b,
                     std::span<const std::string> ids) {
  const auto rows = SharedRows(a, b, ids);
  if (rows.empty()) return 0.0;
  double total = 0.0;
  for (const auto& [ra, rb] : rows) {
    const auto x = a.in_row(ra);
    const auto y = b.in_row(rb);
    double xy = 0, xx = 0, yy = 0;
    for (size_t d = 0; d < x.size(); ++d) {
      xy += x[d] * y[d];
      xx += x[d] * x[d];
      yy += y[d] * y[d];
    }
    if (xx > 0 && yy > 0) total += xy / std::sqrt(xx * yy);
  }
  return total / static_cast<double>(rows.size());
}

double MeanAbsDimensionCorrelation(const EmbeddingModel& a, const EmbeddingModel& b,
                                   std::span<const std::string> ids) {
  const auto rows = SharedRows(a, b, ids);
  if (rows.size() < 2) return 0.0;
  const double n = static_cast<double>(rows.size());
  double total = 0.0;
  for (int d = 0; d < a.dim(); ++d) {
    double mx = 0, my = 0;
    for (const auto& [ra, rb] : rows) {
      mx += a.in_row(ra)[d];
      my += b.in_row(rb)[d];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (const auto& [ra, rb] : rows) {
      const double x = a.in_row(ra)[d] - mx;
      const double y = b.in_row(rb)[d] - my;
      sxy += x * y;
      sxx += x * x;
      syy += y * y;
    }
    if (sxx > 0 && syy > 0) total += std::abs(sxy / std::sqrt(sxx * syy));
  }
  return total / a.dim();
}

}  // namespace cltv
