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

#include "sgbdt/ensemble.h"

#include <fstream>

#include "absl/strings/str_cat.h"

namespace sgbdt {

double Ensemble::PredictRaw(std::span<const double> x) const {
  double sum = 0.0;
  for (const Tree& t : trees) sum += t.Evaluate(x);
  return init_score + eta * sum;
}

double Ensemble::PredictLabel(std::span<const double> x) const {
  return LabelFromRaw(loss, PredictRaw(x));
}

absl::StatusOr<double> Ensemble::Predict(std::span<const double> x,
                                         int num_features) const {
  if (static_cast<int>(x.size()) != num_features) {
    return absl::InvalidArgumentError(absl::StrCat(
        "feature vector has ", x.size(), " entries, expected ", num_features));
  }
  for (const Tree& t : trees) {
    for (const Split& s : t.splits()) {
      if (s.feature >= num_features) {
        return absl::InvalidArgumentError("model references unknown feature");
      }
    }
  }
  return PredictLabel(x);
}

std::vector<double> Ensemble::PredictAll(const Dataset& data) const {
  std::vector<double> out(data.size());
  for (size_t i = 0; i < data.size(); ++i) out[i] = PredictLabel(data.row(i));
  return out;
}

nlohmann::json Ensemble::ToJson() const {
  nlohmann::json j;
  j["init_score"] = init_score;
  j["eta"] = eta;
  j["loss"] = loss == LossKind::kSquaredError ? "squared_error" : "logistic";
  j["trees"] = nlohmann::json::array();
  for (const Tree& t : trees) j["trees"].push_back(t.ToJson());
  return j;
}

absl::StatusOr<Ensemble> Ensemble::FromJson(const nlohmann::json& j) {
  Ensemble e;
  try {
    e.init_score = j.at("init_score").get<double>();
    e.eta = j.at("eta").get<double>();
    e.loss = j.value("loss", "squared_error") == "logistic"
                 ? LossKind::kLogistic
                 : LossKind::kSquaredError;
    for (const nlohmann::json& t : j.at("trees")) {
      absl::StatusOr<Tree> tree = Tree::FromJson(t);
      if (!tree.ok()) return tree.status();
      e.trees.push_back(*std::move(tree));
    }
  } catch (const nlohmann::json::exception& ex) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed model: ", ex.what()));
  }
  return e;
}

absl::Status Ensemble::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << ToJson().dump(1) << "\n";
  return absl::OkStatus();
}

absl::StatusOr<Ensemble> Ensemble::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& ex) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", ex.what()));
  }
  return FromJson(j);
}

}  // namespace sgbdt
