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

#ifndef SGBDT_DPBOOST_H_
#define SGBDT_DPBOOST_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "sgbdt/dataset.h"
#include "sgbdt/ensemble.h"
#include "sgbdt/hyperparameters.h"

namespace sgbdt {

// Knobs of the DPBoost-style baseline. Privacy: eps_trees (from the shared
// hyperparameters) is split evenly over the inner ensembles, which compose
// sequentially; trees inside one inner ensemble see disjoint data and each
// use the full per-ensemble budget, half for splits (even per level) and
// half for leaves.
struct DpBoostOptions {
  int num_ensembles = 1;
  int trees_per_ensemble = 50;
  bool gdf = true;         // gradient-based data filtering
  bool init_score = true;  // private initial score (uses eps_init)
};

// Clamps |v| to g* (1 - eta)^(t - 1); t is 1-based.
double GeometricLeafClip(double v, int t, double g_star, double eta);

// Indices with |g| <= g*.
std::vector<size_t> GdfFilter(std::span<const double> gradients,
                              double g_star);

// Leaf sensitivity: min(g* / (1 + lambda), 2 g* (1 - eta)^(t - 1)).
double DpBoostLeafSensitivity(int t, double g_star, double lambda, double eta);

struct DpBoostManifest {
  double epsilon_init = 0.0;
  double epsilon_trees = 0.0;
  double epsilon_total = 0.0;
  double eps_leaf = 0.0;
  double eps_split_level = 0.0;
  // Points each tree trained on, in training order.
  std::vector<size_t> tree_sizes;

  nlohmann::json ToJson() const;
};

struct DpBoostResult {
  Ensemble ensemble;
  DpBoostManifest manifest;
  // Per inner ensemble, the row sets of its trees (for disjointness checks).
  std::vector<std::vector<std::vector<size_t>>> partitions;
};

// Trees use depth, eta, lambda, g_star, r, eps_trees; the initial score uses
// m_star, eps_init and init_noise. eps_trees = +inf gives the noiseless
// greedy limit.
absl::StatusOr<DpBoostResult> TrainDpBoost(const Dataset& data,
                                           const Hyperparameters& h,
                                           const DpBoostOptions& options,
                                           uint64_t seed);

}  // namespace sgbdt

#endif  // SGBDT_DPBOOST_H_
