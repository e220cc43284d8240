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

#include "sgbdt/loss.h"

#include "absl/strings/str_cat.h"

namespace sgbdt {
namespace {

absl::Status CheckLengths(std::span<const double> predictions,
                          std::span<const double> labels) {
  if (predictions.size() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("length mismatch: ", predictions.size(), " predictions, ",
                     labels.size(), " labels"));
  }
  if (labels.empty()) return absl::InvalidArgumentError("no labels");
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> RSquared(std::span<const double> predictions,
                                std::span<const double> labels) {
  if (absl::Status s = CheckLengths(predictions, labels); !s.ok()) return s;
  double mean = 0.0;
  for (double y : labels) mean += y;
  mean /= labels.size();
  double ss_res = 0.0, ss_tot = 0.0;
  for (size_t i = 0; i < labels.size(); ++i) {
    ss_res += (labels[i] - predictions[i]) * (labels[i] - predictions[i]);
    ss_tot += (labels[i] - mean) * (labels[i] - mean);
  }
  if (ss_tot == 0.0) {
    return absl::InvalidArgumentError("R^2 undefined for constant labels");
  }
  return 1.0 - ss_res / ss_tot;
}

absl::StatusOr<double> ErrorRate(std::span<const double> predictions,
                                 std::span<const double> labels) {
  if (absl::Status s = CheckLengths(predictions, labels); !s.ok()) return s;
  size_t wrong = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    wrong += predictions[i] != labels[i];
  }
  return static_cast<double>(wrong) / labels.size();
}

absl::StatusOr<double> TaskMetric(Task task,
                                  std::span<const double> predictions,
                                  std::span<const double> labels) {
  return task == Task::kRegression ? RSquared(predictions, labels)
                                   : ErrorRate(predictions, labels);
}

}  // namespace sgbdt
