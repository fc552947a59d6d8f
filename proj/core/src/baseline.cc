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

#include "cltv/baseline.h"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace cltv {

namespace {

size_t Width(const ColumnSpec& c) {
  return c.kind == ColumnKind::kCategorical ? c.categories.size() : 1;
}

double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

std::vector<double> LogisticBaseline::Design(std::span<const double> row) const {
  if (row.size() != columns_.size()) throw std::invalid_argument("feature count mismatch");
  std::vector<double> out;
  for (size_t c = 0; c < columns_.size(); ++c) {
    const double v = row[c];
    if (columns_[c].kind == ColumnKind::kCategorical) {
      const size_t n = columns_[c].categories.size();
      for (size_t k = 0; k < n; ++k) {
        out.push_back(!IsMissing(v) && static_cast<size_t>(v) == k ? 1.0 : 0.0);
      }
    } else {
      out.push_back(((IsMissing(v) ? mean_[c] : v) - mean_[c]) / scale_[c]);
    }
  }
  return out;
}

double LogisticBaseline::PredictProba(std::span<const double> row) const {
  const std::vector<double> z = Design(row);
  double s = intercept_;
  for (size_t j = 0; j < z.size(); ++j) s += coef_[j] * z[j];
  return Sigmoid(s);
}

std::vector<double> LogisticBaseline::PredictRows(const FeatureMatrix& x) const {
  std::vector<double> out(x.rows());
  for (size_t r = 0; r < x.rows(); ++r) out[r] = PredictProba(x.Row(r));
  return out;
}

LogisticBaseline FitLogisticBaseline(const FeatureMatrix& x, std::span<const double> labels,
                                     double ridge) {
  if (labels.size() != x.rows()) throw std::invalid_argument("label count mismatch");
  size_t positives = 0;
  for (double y : labels) positives += y != 0.0;
  if (positives == 0 || positives == labels.size()) {
    throw std::invalid_argument("logistic baseline needs both classes");
  }
  LogisticBaseline model;
  model.columns_ = x.columns();
  model.mean_.assign(x.cols(), 0.0);
  model.scale_.assign(x.cols(), 1.0);
  size_t width = 0;
  for (size_t c = 0; c < x.cols(); ++c) {
    width += Width(x.columns()[c]);
    if (x.columns()[c].kind == ColumnKind::kCategorical) continue;
    double sum = 0, sq = 0, n = 0;
    for (double v : x.column(c)) {
      if (IsMissing(v)) continue;
      sum += v;
      sq += v * v;
      n += 1;
    }
    if (n > 0) {
      model.mean_[c] = sum / n;
      const double var = sq / n - model.mean_[c] * model.mean_[c];
      if (var > 1e-12) model.scale_[c] = std::sqrt(var);
    }
  }

  const auto rows = static_cast<Eigen::Index>(x.rows());
  const auto cols = static_cast<Eigen::Index>(width + 1);
  Eigen::MatrixXd design(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const std::vector<double> z = model.Design(x.Row(static_cast<size_t>(r)));
    design(r, 0) = 1.0;
    for (size_t j = 0; j < z.size(); ++j) design(r, static_cast<Eigen::Index>(j + 1)) = z[j];
    y(r) = labels[static_cast<size_t>(r)] != 0.0 ? 1.0 : 0.0;
  }
  Eigen::VectorXd penalty = Eigen::VectorXd::Constant(cols, ridge * static_cast<double>(rows));
  penalty(0) = 0.0;

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(cols);
  for (int it = 0; it < 50; ++it) {
    const Eigen::VectorXd eta = design * beta;
    Eigen::VectorXd p(rows), w(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      p(r) = Sigmoid(eta(r));
      w(r) = std::max(p(r) * (1.0 - p(r)), 1e-10);
    }
    const Eigen::VectorXd grad =
        design.transpose() * (p - y) + penalty.cwiseProduct(beta);
    Eigen::MatrixXd hessian = design.transpose() * w.asDiagonal() * design;
    hessian.diagonal() += penalty;
    hessian.diagonal().array() += 1e-9;
    const Eigen::VectorXd step = hessian.ldlt().solve(grad);
    beta -= step;
    if (step.norm() < 1e-10 * (1.0 + beta.norm())) break;
  }
  model.intercept_ = beta(0);
  model.coef_.assign(beta.data() + 1, beta.data() + cols);
  return model;
}

}  // namespace cltv
