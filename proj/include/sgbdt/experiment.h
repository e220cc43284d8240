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

#ifndef SGBDT_EXPERIMENT_H_
#define SGBDT_EXPERIMENT_H_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "sgbdt/dataset.h"
#include "sgbdt/dpboost.h"
#include "sgbdt/hyperparameters.h"

namespace sgbdt {

enum class Learner { kSgbdt, kDpBoost, kDpMean, kNonPrivate };

absl::StatusOr<Learner> ParseLearner(const std::string& name);
const char* LearnerName(Learner learner);

// Late-arriving batch for the stream scenario.
struct StreamConfig {
  double batch_fraction = 0.2;  // share of each training fold held back
  bool non_iid = true;          // top label quartile / positive class only
};

// Experiment description, read from JSON:
//   {
//     "dataset": "adult", "data": "data/adult.csv",
//     "schema": "data/adult.schema.json",
//     "learner": "sgbdt", "folds": 5, "repeats": 20, "seed": 1,
//     "epsilons": [0.07, 0.54],
//     "init_fraction": 0.1,
//     "hyperparameters": {...},
//     "per_epsilon": {"0.54": {...}},
//     "dpboost": {"num_ensembles": 1, "trees_per_ensemble": 50, "gdf": true},
//     "grid": {"eta": [0.1, 0.2], ...}, "search_repeats": 2,
//     "stream": {"batch_fraction": 0.2, "non_iid": true},
//     "threads": 1
//   }
// Paths are resolved relative to the config file's directory unless absolute.
struct ExperimentConfig {
  std::string dataset;
  std::string data_path;
  std::string schema_path;
  Learner learner = Learner::kSgbdt;
  int folds = 5;
  int repeats = 20;
  uint64_t seed = 1;
  std::vector<double> epsilons;
  // Share of each total epsilon spent on the initial score.
  double init_fraction = 0.1;
  Hyperparameters base;
  // Hyperparameter overrides per epsilon, keyed by the epsilon as written.
  std::map<double, nlohmann::json> per_epsilon;
  DpBoostOptions dpboost;
  // Hyperparameter name -> candidate values.
  std::map<std::string, std::vector<nlohmann::json>> grid;
  int search_repeats = 1;
  StreamConfig stream;
  int threads = 1;

  nlohmann::json raw;  // as read, used for the config hash

  static absl::StatusOr<ExperimentConfig> FromJson(const nlohmann::json& j,
                                                   const std::string& base_dir);
  static absl::StatusOr<ExperimentConfig> LoadFile(const std::string& path);

  // Hyperparameters for one epsilon: base + overrides + budget split.
  absl::StatusOr<Hyperparameters> ForEpsilon(double epsilon) const;
};

// 64-bit FNV-1a of the canonical (key-sorted, compact) JSON dump, as hex.
std::string ConfigHash(const nlohmann::json& j);

// One train/test evaluation.
struct CellResult {
  double metric = 0.0;
  double epsilon_reported = 0.0;
  // Ledger checks (S-GBDT only).
  bool ledger_checked = false;
  bool ledger_ok = true;
  double max_spent = 0.0;
  double budget = 0.0;
  std::string ledger_error;
};

absl::StatusOr<CellResult> RunLearner(Learner learner, const Dataset& train,
                                      const Dataset& test,
                                      const Hyperparameters& h,
                                      const DpBoostOptions& dpboost,
                                      uint64_t seed,
                                      const std::vector<int>& arrival = {});

// Row-index folds of one repeat: fold f is the test set.
std::vector<std::vector<size_t>> MakeFolds(size_t n, int folds, uint64_t seed);

struct ResultRow {
  std::string learner;
  std::string dataset;
  double epsilon = 0.0;
  std::string metric;
  double mean = 0.0;
  double std = 0.0;
  uint64_t seed = 0;
  std::string config_hash;
  // Not written to the CSV.
  std::vector<double> values;
  nlohmann::json details;
};

struct ExperimentOutput {
  std::vector<ResultRow> rows;
  nlohmann::json manifest;
};

// Cross-validated evaluation of the configured learner at every epsilon.
// With a non-empty grid, a search (search_repeats repeats) picks the
// hyperparameters per epsilon first.
absl::StatusOr<ExperimentOutput> RunExperiment(const ExperimentConfig& config);

// Stream scenario: each training fold is split into an initial pool and a
// late batch arriving at round t_regular; S-GBDT runs with the filter on and
// off at every epsilon.
absl::StatusOr<ExperimentOutput> RunStreamScenario(
    const ExperimentConfig& config);

// results.csv and manifest.json into `dir` (created if missing).
absl::Status WriteOutputs(const ExperimentOutput& output,
                          const std::string& dir);

std::string ResultsCsv(const std::vector<ResultRow>& rows);

}  // namespace sgbdt

#endif  // SGBDT_EXPERIMENT_H_
