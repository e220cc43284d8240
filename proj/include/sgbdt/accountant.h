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

#ifndef SGBDT_ACCOUNTANT_H_
#define SGBDT_ACCOUNTANT_H_

#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "sgbdt/hyperparameters.h"

namespace sgbdt {

// Output of Initialize: the order and leaf noise that fit eps_trees.
struct AccountantPlan {
  int alpha_hat = 2;
  double sigma2_leaf = 0.0;
  // Budget rho(alpha_hat) every point may spend: the worst-case per-round
  // loss composed over the accounted rounds.
  double rho_budget = 0.0;
  double rho_per_round = 0.0;
  int rounds_accounted = 0;
  // Converted (eps, delta_trees) guarantee of the trees.
  double epsilon_reported = 0.0;

  nlohmann::json ToJson() const;
};

// The 200 candidate leaf variances 1e-3 * 10^(6k/200), k = 1..200, which
// geometrically cover (1e-3, 1000].
const std::vector<double>& SigmaGrid();

// Rounds the plan must cover: with the filter on, only t_regular rounds are
// composed (extra rounds are admitted by the per-point budget); with the
// filter off every round is composed.
int AccountedRounds(const Hyperparameters& h);

// Worst-case per-round loss at `alpha` for leaf variance sigma2.
double WorstCaseRoundLoss(const Hyperparameters& h, int alpha, double sigma2);

// rho over `rounds` copies of the worst-case round, summed sequentially so the
// result is bit-identical to what a ledger accumulates.
double ComposedRho(const Hyperparameters& h, int alpha, double sigma2,
                   int rounds);

// Converted epsilon of the trees for one (alpha, sigma2) candidate.
double CandidateEpsilon(const Hyperparameters& h, int alpha, double sigma2);

// Picks the smallest grid variance with eps' <= eps_trees over all orders
// (ties: smaller eps', then smaller alpha), then narrows sigma2 between
// adjacent grid points until eps' lands in [0.95, 1] * eps_trees. Fails with
// the closest achievable eps' if even sigma2 = 1000 is not enough.
absl::StatusOr<AccountantPlan> Initialize(const Hyperparameters& h);

}  // namespace sgbdt

#endif  // SGBDT_ACCOUNTANT_H_
