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

#ifndef CLTV_BASELINE_H_
#define CLTV_BASELINE_H_

#include <span>
#include <string>
#include <vector>

#include "cltv/dataset.h"

namespace cltv {

// Plain L2-regularized logistic regression used as a reference point for the
// churn forest. Numeric columns are mean-imputed and standardized; categorical
// columns are one-hot encoded with missing and unseen ids as all zeros.
class LogisticBaseline {
 public:
  double PredictProba(std::span<const double> row) const;
  std::vector<double> PredictRows(const FeatureMatrix& x) const;
  const std::vector<double>& coefficients() const { return coef_; }
  double intercept() const { return intercept_; }

 private:
  friend LogisticBaseline FitLogisticBaseline(const FeatureMatrix&, std::span<const double>,
                                              double);
  std::vector<double> Design(std::span<const double> row) const;

  std::vector<ColumnSpec> columns_;
  std::vector<double> mean_;
  std::vector<double> scale_;
  std::vector<double> coef_;
  double intercept_ = 0.0;
};

// Newton-Raphson (IRLS) on the penalized log-likelihood; the intercept is not
// penalized. Labels are 0/1. Throws std::invalid_argument for a single class.
LogisticBaseline FitLogisticBaseline(const FeatureMatrix& x, std::span<const double> labels,
                                     double ridge = 1e-2);

}  // namespace cltv

#endif  // CLTV_BASELINE_H_
