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

#ifndef SGBDT_HYPERPARAMETERS_H_
#define SGBDT_HYPERPARAMETERS_H_

#include <string>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"

namespace sgbdt {

// Leaf release. kDynamic noises support and gradient sum separately so that
// the effective noise shrinks with leaf size; kStatic divides the noisy sum
// by a data-independent expected support.
enum class LeafNoise { kDynamic, kStatic };

// Laplace scale of the private initial score. kWideScale samples
// 2 m* / (n eps_init) and accounts with ratio eps_init; kNarrowScale samples
// m* / (n eps_init) and accounts with ratio 2 eps_init. Both are sound.
enum class InitNoise { kWideScale, kNarrowScale };

// RDP to (eps, delta) conversion. kSimple solves exp(rho - alpha eps) = delta
// and is kept for comparison only: it under-reports eps (it tends to a finite
// value as alpha grows for any delta). kStandard is
// rho + log(1/delta)/(alpha-1); kBalle is the tighter sound variant.
enum class AdpConversion { kSimple, kStandard, kBalle };

// Poisson subsampling amplification. kGeneral holds for any mechanism with
// the given RDP curve (factor 3 on the l >= 3 terms); kGaussian is the exact
// binomial expansion for Gaussian mechanisms (no factor 3).
enum class SubsamplingBound { kGeneral, kGaussian };

struct Hyperparameters {
  double g_star = 1.0;      // gradient clip bound
  double m_star = 1.0;      // label clip bound for the initial score
  double lambda = 1.0;      // leaf regularisation / support floor
  double eta = 0.1;         // learning rate
  int depth = 4;
  double gamma = 0.1;       // Poisson subsampling ratio
  int t_regular = 100;
  int t_extra = 0;
  double eps_init = 0.0;    // 0 disables the private initial score
  double eps_trees = 1.0;
  double delta_trees = 1e-5;
  double r1 = 0.5;          // support noise weight
  double r2 = 0.5;          // sum noise weight
  double r = 1.0;           // numerical feature weight for split sampling
  int alpha_max = 64;

  bool use_filter = true;
  bool use_init_score = true;
  LeafNoise leaf_noise = LeafNoise::kDynamic;
  InitNoise init_noise = InitNoise::kWideScale;
  AdpConversion adp_conversion = AdpConversion::kBalle;
  SubsamplingBound subsampling_bound = SubsamplingBound::kGaussian;
  // Resolution of the |g| grid used to tabulate per-point losses.
  int loss_table_size = 1024;

  int total_rounds() const { return t_regular + t_extra; }

  absl::Status Validate() const;
  nlohmann::json ToJson() const;
  // Missing keys keep their defaults; unknown keys are rejected.
  static absl::StatusOr<Hyperparameters> FromJson(const nlohmann::json& j);
};

}  // namespace sgbdt

#endif  // SGBDT_HYPERPARAMETERS_H_
