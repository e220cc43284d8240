// Copyright 2026 The sgbdt Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SGBDT_LOSS_H_
#define SGBDT_LOSS_H_

#include <cmath>
#include <span>

#include "absl/status/statusor.h"
#include "sgbdt/schema.h"

namespace sgbdt {

enum class LossKind { kSquaredError, kLogistic };

inline LossKind LossForTask(Task task) {
  return task == Task::kRegression ? LossKind::kSquaredError
                                   : LossKind::kLogistic;
}

inline double Sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline double Logit(double p) { return std::log(p / (1.0 - p)); }

// First-order gradient of the loss w.r.t. the raw score. The sign is that of
// (prediction - target), so leaves move along the negative gradient.
inline double Gradient(LossKind loss, double y, double raw) {
  return loss == LossKind::kSquaredError ? raw - y : Sigmoid(raw) - y;
}

// Coefficient of determination. Errors when the labels are constant.
absl::StatusOr<double> RSquared(std::span<const double> predictions,
                                std::span<const double> labels);

// Fraction of mismatches between 0/1 predictions and labels.
absl::StatusOr<double> ErrorRate(std::span<const double> predictions,
                                 std::span<const double> labels);

// R^2 for regression, test error for classification.
absl::StatusOr<double> TaskMetric(Task task,
                                  std::span<const double> predictions,
                                  std::span<const double> labels);

inline const char* MetricName(Task task) {
  return task == Task::kRegression ? "r2" : "test_error";
}

}  // namespace sgbdt

#endif  // SGBDT_LOSS_H_
