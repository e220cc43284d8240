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

#ifndef SGBDT_ENSEMBLE_H_
#define SGBDT_ENSEMBLE_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "sgbdt/dataset.h"
#include "sgbdt/loss.h"
#include "sgbdt/tree.h"

namespace sgbdt {

// init_score + eta * sum_t f_t(x). Immutable once training returns it.
struct Ensemble {
  double init_score = 0.0;
  double eta = 1.0;
  LossKind loss = LossKind::kSquaredError;
  std::vector<Tree> trees;

  // Raw additive score; no arity check.
  double PredictRaw(std::span<const double> x) const;

  // Regression: the raw score. Classification: 1 if sigmoid(raw) >= 0.5.
  double PredictLabel(std::span<const double> x) const;

  // Checked entry point for external callers.
  absl::StatusOr<double> Predict(std::span<const double> x,
                                 int num_features) const;

  std::vector<double> PredictAll(const Dataset& data) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<Ensemble> FromJson(const nlohmann::json& j);
  absl::Status Save(const std::string& path) const;
  static absl::StatusOr<Ensemble> Load(const std::string& path);
};

// Label decision from a raw score.
inline double LabelFromRaw(LossKind loss, double raw) {
  if (loss == LossKind::kSquaredError) return raw;
  return Sigmoid(raw) >= 0.5 ? 1.0 : 0.0;
}

}  // namespace sgbdt

#endif  // SGBDT_ENSEMBLE_H_
