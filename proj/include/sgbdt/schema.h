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

#ifndef SGBDT_SCHEMA_H_
#define SGBDT_SCHEMA_H_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace sgbdt {

enum class FeatureKind { kNumerical, kCategorical };

enum class Task { kRegression, kClassification };

// Data-independent description of one feature. Numerical features carry a
// static border [min, max]; categorical features carry their value list, whose
// order fixes the integer codes used everywhere else.
class FeatureSpec {
 public:
  static absl::StatusOr<FeatureSpec> Numerical(std::string name, double min,
                                               double max);
  static absl::StatusOr<FeatureSpec> Categorical(
      std::string name, std::vector<std::string> values);

  const std::string& name() const { return name_; }
  FeatureKind kind() const { return kind_; }
  bool is_numerical() const { return kind_ == FeatureKind::kNumerical; }
  bool is_categorical() const { return kind_ == FeatureKind::kCategorical; }
  double min() const { return min_; }
  double max() const { return max_; }
  const std::vector<std::string>& values() const { return values_; }
  int num_values() const { return static_cast<int>(values_.size()); }

  // Clamps into [min, max]. Only meaningful for numerical features.
  double Clamp(double v) const;

  // Code of a categorical value, or nullopt when the value is not declared.
  std::optional<int> CodeOf(std::string_view value) const;

  nlohmann::json ToJson() const;
  static absl::StatusOr<FeatureSpec> FromJson(const nlohmann::json& j);

 private:
  FeatureSpec() = default;

  std::string name_;
  FeatureKind kind_ = FeatureKind::kNumerical;
  double min_ = 0.0;
  double max_ = 0.0;
  std::vector<std::string> values_;
};

// Feature list plus label description.
//
// JSON layout:
//   {
//     "task": "regression" | "classification",
//     "label": {"name": "rings", "positive": ">50K" (classification only)},
//     "features": [
//       {"name": "length", "kind": "numerical", "min": 0, "max": 1},
//       {"name": "sex", "kind": "categorical", "values": ["M", "F", "I"]}
//     ]
//   }
struct Schema {
  Task task = Task::kRegression;
  std::string label;
  // Classification: label text mapped to 1. Other labels map to 0. When
  // unset, classification labels must already be 0 or 1.
  std::optional<std::string> positive_label;
  std::vector<FeatureSpec> features;

  int num_features() const { return static_cast<int>(features.size()); }

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  static absl::StatusOr<Schema> FromJson(const nlohmann::json& j);
  static absl::StatusOr<Schema> LoadFile(const std::string& path);
};

}  // namespace sgbdt

#endif  // SGBDT_SCHEMA_H_
