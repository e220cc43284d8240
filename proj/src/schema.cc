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

#include "sgbdt/schema.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"

namespace sgbdt {

absl::StatusOr<FeatureSpec> FeatureSpec::Numerical(std::string name,
                                                   double min, double max) {
  if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature '", name, "': numerical range requires min < max,"
                     " got [", min, ", ", max, "]"));
  }
  FeatureSpec spec;
  spec.name_ = std::move(name);
  spec.kind_ = FeatureKind::kNumerical;
  spec.min_ = min;
  spec.max_ = max;
  return spec;
}

absl::StatusOr<FeatureSpec> FeatureSpec::Categorical(
    std::string name, std::vector<std::string> values) {
  if (values.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("feature '", name, "': empty categorical value list"));
  }
  std::set<std::string> seen;
  for (const std::string& v : values) {
    if (!seen.insert(v).second) {
      return absl::InvalidArgumentError(absl::StrCat(
          "feature '", name, "': duplicate categorical value '", v, "'"));
    }
  }
  FeatureSpec spec;
  spec.name_ = std::move(name);
  spec.kind_ = FeatureKind::kCategorical;
  spec.values_ = std::move(values);
  // Codes live in [0, |V|); the border is only used for bookkeeping.
  spec.min_ = 0.0;
  spec.max_ = static_cast<double>(spec.values_.size());
  return spec;
}

double FeatureSpec::Clamp(double v) const { return std::clamp(v, min_, max_); }

std::optional<int> FeatureSpec::CodeOf(std::string_view value) const {
  auto it = std::find(values_.begin(), values_.end(), value);
  if (it == values_.end()) return std::nullopt;
  return static_cast<int>(it - values_.begin());
}

nlohmann::json FeatureSpec::ToJson() const {
  nlohmann::json j;
  j["name"] = name_;
  if (is_numerical()) {
    j["kind"] = "numerical";
    j["min"] = min_;
    j["max"] = max_;
  } else {
    j["kind"] = "categorical";
    j["values"] = values_;
  }
  return j;
}

absl::StatusOr<FeatureSpec> FeatureSpec::FromJson(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("name") || !j.contains("kind")) {
    return absl::InvalidArgumentError(
        "feature entry needs 'name' and 'kind' fields");
  }
  const std::string name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "numerical") {
    if (!j.contains("min") || !j.contains("max")) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature '", name, "': numerical range missing"));
    }
    return Numerical(name, j.at("min").get<double>(), j.at("max").get<double>());
  }
  if (kind == "categorical") {
    if (!j.contains("values")) {
      return absl::InvalidArgumentError(
          absl::StrCat("feature '", name, "': categorical values missing"));
    }
    return Categorical(name, j.at("values").get<std::vector<std::string>>());
  }
  return absl::InvalidArgumentError(
      absl::StrCat("feature '", name, "': unknown kind '", kind, "'"));
}

absl::Status Schema::Validate() const {
  if (features.empty()) {
    return absl::InvalidArgumentError("schema has no features");
  }
  if (label.empty()) return absl::InvalidArgumentError("schema has no label");
  std::set<std::string> names;
  for (const FeatureSpec& f : features) {
    if (!names.insert(f.name()).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate feature name '", f.name(), "'"));
    }
  }
  if (names.count(label) > 0) {
    return absl::InvalidArgumentError("label is also declared as a feature");
  }
  return absl::OkStatus();
}

nlohmann::json Schema::ToJson() const {
  nlohmann::json j;
  j["task"] = task == Task::kRegression ? "regression" : "classification";
  j["label"]["name"] = label;
  if (positive_label) j["label"]["positive"] = *positive_label;
  j["features"] = nlohmann::json::array();
  for (const FeatureSpec& f : features) j["features"].push_back(f.ToJson());
  return j;
}

absl::StatusOr<Schema> Schema::FromJson(const nlohmann::json& j) {
  Schema schema;
  try {
    const std::string task = j.value("task", "regression");
    if (task == "regression") {
      schema.task = Task::kRegression;
    } else if (task == "classification") {
      schema.task = Task::kClassification;
    } else {
      return absl::InvalidArgumentError(absl::StrCat("unknown task '", task, "'"));
    }
    const nlohmann::json& label = j.at("label");
    if (label.is_string()) {
      schema.label = label.get<std::string>();
    } else {
      schema.label = label.at("name").get<std::string>();
      if (label.contains("positive")) {
        schema.positive_label = label.at("positive").get<std::string>();
      }
    }
    for (const nlohmann::json& f : j.at("features")) {
      absl::StatusOr<FeatureSpec> spec = FeatureSpec::FromJson(f);
      if (!spec.ok()) return spec.status();
      schema.features.push_back(*std::move(spec));
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(absl::StrCat("malformed schema: ", e.what()));
  }
  if (absl::Status s = schema.Validate(); !s.ok()) return s;
  return schema;
}

absl::StatusOr<Schema> Schema::LoadFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open schema ", path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("schema ", path, " is not valid JSON: ", e.what()));
  }
  return FromJson(j);
}

}  // namespace sgbdt
