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

#ifndef CLTV_SGNS_H_
#define CLTV_SGNS_H_

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cltv/pairgen.h"

namespace cltv {

struct SgnsConfig {
  int dim = 64;
  int window_length = 11;
  int k_negatives = 5;
  // Learning rate, decayed linearly to eta_floor over all training steps.
  double eta = 0.025;
  double eta_floor = 0.0001;
  int epochs = 5;
  double exponent = 0.75;
  // Unset means 0.5 / dim.
  std::optional<double> init_scale;
  // Unset means 1% of the initial scale.
  std::optional<double> warm_init_scale;
  uint64_t seed = 1;
  // 1 is the bit-reproducible single-updater mode; more threads apply updates
  // concurrently without locks.
  int threads = 1;

  double InitScale() const { return init_scale.value_or(0.5 / dim); }
  double WarmInitScale() const { return warm_init_scale.value_or(0.01 * InitScale()); }
  // Throws std::invalid_argument naming the field.
  void Validate() const;
  bool operator==(const SgnsConfig&) const = default;
};

// Input and output embedding matrices, row-major, one row per customer.
class EmbeddingModel {
 public:
  EmbeddingModel() = default;
  // All-zero matrices.
  EmbeddingModel(CustomerIndex index, int dim);

  int dim() const { return dim_; }
  size_t rows() const { return index_.size(); }
  const CustomerIndex& index() const { return index_; }

  std::span<double> in_row(uint32_t row) {
    return {w_in_.data() + static_cast<size_t>(row) * dim_, static_cast<size_t>(dim_)};
  }
  std::span<const double> in_row(uint32_t row) const {
    return {w_in_.data() + static_cast<size_t>(row) * dim_, static_cast<size_t>(dim_)};
  }
  std::span<double> out_row(uint32_t row) {
    return {w_out_.data() + static_cast<size_t>(row) * dim_, static_cast<size_t>(dim_)};
  }
  std::span<const double> out_row(uint32_t row) const {
    return {w_out_.data() + static_cast<size_t>(row) * dim_, static_cast<size_t>(dim_)};
  }

  std::vector<double>& w_in() { return w_in_; }
  const std::vector<double>& w_in() const { return w_in_; }
  std::vector<double>& w_out() { return w_out_; }
  const std::vector<double>& w_out() const { return w_out_; }

  bool AllFinite() const;
  bool operator==(const EmbeddingModel&) const = default;

 private:
  CustomerIndex index_;
  int dim_ = 0;
  std::vector<double> w_in_;
  std::vector<double> w_out_;
};

// Customers seen in the prior training period versus those that are new.
struct CohortMap {
  std::set<std::string> old_customers;
  std::set<std::string> new_customers;

  // Splits `current` by membership in `prior`.
  static CohortMap FromIndices(const CustomerIndex& prior, const CustomerIndex& current);
  // Per-row flag over `index`; throws std::invalid_argument unless the two sets
  // are disjoint and their union is exactly the index.
  std::vector<bool> OldMask(const CustomerIndex& index) const;
};

// W_in uniform in [-init_scale, init_scale], W_out zero. Throws
// std::invalid_argument for an empty cohort.
EmbeddingModel InitModel(const CustomerIndex& cohort, const SgnsConfig& config);

// Old customers copy both rows from `prior`; new customers get W_in and W_out
// uniform in [-warm_init_scale, warm_init_scale]. Throws std::invalid_argument
// if an old customer is missing from the prior.
EmbeddingModel WarmStartInit(const EmbeddingModel& prior, const CohortMap& cohorts,
                             const SgnsConfig& config);

// One negative-sampling gradient step on (pair.in, pair.out) with the given
// negatives. A negative equal to pair.out is scored as a positive. Both
// matrices are updated from a single forward pass, so the input-row gradient
// uses the output rows as they were before this step. Returns the loss of that
// forward pass.
double SgdStep(EmbeddingModel& model, TrainingPair pair,
               std::span<const uint32_t> negatives, double eta);

// -log sig(v'_out . v_in) - sum_neg log sig(-v'_neg . v_in).
double EmbeddingLoss(const EmbeddingModel& model, TrainingPair pair,
                     std::span<const uint32_t> negatives);

struct TrainResult {
  // Mean per-pair loss of each epoch, measured on the forward pass.
  std::vector<double> epoch_loss;
  uint64_t steps = 0;
};

// Runs config.epochs passes over `pairs`. With cohorts, every epoch processes
// (old,old), (new,old), (old,new), (new,new) pairs in that order, shuffling
// within each phase; otherwise the whole epoch is shuffled. Table rows and pair
// rows index `model`. Throws std::invalid_argument on empty pairs and
// std::out_of_range on a row outside the model.
TrainResult Train(std::span<const TrainingPair> pairs, EmbeddingModel& model,
                  const NegativeTable& table, const SgnsConfig& config,
                  const CohortMap* cohorts = nullptr);

// Index of the phase (0..3) a pair belongs to under the ordered schedule.
int PairPhase(TrainingPair pair, const std::vector<bool>& old_mask);

// W_in rows keyed by customer id; column j is dimension j.
struct EmbeddingTable {
  std::vector<std::string> ids;
  int dim = 0;
  std::vector<double> values;

  std::span<const double> row(size_t i) const {
    return {values.data() + i * static_cast<size_t>(dim), static_cast<size_t>(dim)};
  }
  std::vector<std::string> ColumnNames() const;
  bool operator==(const EmbeddingTable&) const = default;
};

EmbeddingTable ExportEmbeddings(const EmbeddingModel& model);

// Cross-run drift diagnostics over customers present in both models.
double MeanRowCosine(const EmbeddingModel& a, const EmbeddingModel& b,
                     std::span<const std::string> ids);
// Mean over dimensions of |corr(a[:, d], b[:, d])| across the given customers.
double MeanAbsDimensionCorrelation(const EmbeddingModel& a, const EmbeddingModel& b,
                                   std::span<const std::string> ids);

}  // namespace cltv

#endif  // CLTV_SGNS_H_
