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

#include "sgbdt/accountant.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_format.h"
#include "sgbdt/rdp.h"

namespace sgbdt {
namespace {

constexpr int kGridPoints = 200;
constexpr double kTolerance = 0.95;
constexpr int kBisectionSteps = 100;

}  // namespace

nlohmann::json AccountantPlan::ToJson() const {
  return {{"alpha_hat", alpha_hat},
          {"sigma2_leaf", sigma2_leaf},
          {"rho_budget", rho_budget},
          {"rho_per_round", rho_per_round},
          {"rounds_accounted", rounds_accounted},
          {"epsilon_reported", epsilon_reported}};
}

const std::vector<double>& SigmaGrid() {
  static const std::vector<double> grid = [] {
    std::vector<double> g;
    for (int k = 1; k <= kGridPoints; ++k) {
      g.push_back(1e-3 * std::pow(10.0, 6.0 * k / kGridPoints));
    }
    return g;
  }();
  return grid;
}

int AccountedRounds(const Hyperparameters& h) {
  return h.use_filter ? h.t_regular : h.total_rounds();
}

double WorstCaseRoundLoss(const Hyperparameters& h, int alpha, double sigma2) {
  const double g2 = h.g_star * h.g_star;
  return RdpSubsampledLinear(alpha, (h.r1 + h.r2 * g2) / sigma2, h.gamma,
                             h.subsampling_bound);
}

double ComposedRho(const Hyperparameters& h, int alpha, double sigma2,
                   int rounds) {
  const double per_round = WorstCaseRoundLoss(h, alpha, sigma2);
  double total = 0.0;
  for (int t = 0; t < rounds; ++t) total += per_round;
  return total;
}

double CandidateEpsilon(const Hyperparameters& h, int alpha, double sigma2) {
  const double rho = ComposedRho(h, alpha, sigma2, AccountedRounds(h));
  absl::StatusOr<double> eps =
      ConvertRdpToAdp(h.adp_conversion, alpha, rho, h.delta_trees);
  return eps.ok() ? *eps : std::numeric_limits<double>::infinity();
}

absl::StatusOr<AccountantPlan> Initialize(const Hyperparameters& h) {
  if (absl::Status s = h.Validate(); !s.ok()) return s;
  const std::vector<double>& grid = SigmaGrid();
  const int rounds = AccountedRounds(h);

  auto make_plan = [&](int alpha, double sigma2) {
    AccountantPlan plan;
    plan.alpha_hat = alpha;
    plan.sigma2_leaf = sigma2;
    plan.rounds_accounted = rounds;
    plan.rho_per_round = WorstCaseRoundLoss(h, alpha, sigma2);
    plan.rho_budget = ComposedRho(h, alpha, sigma2, rounds);
    plan.epsilon_reported = rounds == 0 ? 0.0 : CandidateEpsilon(h, alpha, sigma2);
    return plan;
  };
  // Nothing data-dependent is released without rounds.
  if (rounds == 0) return make_plan(2, grid.front());

  // For each order, the smallest admissible grid index (eps' is
  // nonincreasing in sigma2, so a binary search would do; the grid is small).
  int best_k = -1, best_alpha = 0;
  double best_eps = 0.0;
  double closest = std::numeric_limits<double>::infinity();
  for (int alpha = 2; alpha <= h.alpha_max; ++alpha) {
    for (int k = 0; k < kGridPoints; ++k) {
      if (best_k >= 0 && k > best_k) break;
      const double eps = CandidateEpsilon(h, alpha, grid[k]);
      closest = std::min(closest, eps);
      if (eps > h.eps_trees) continue;
      if (best_k < 0 || k < best_k || (k == best_k && eps < best_eps)) {
        best_k = k;
        best_alpha = alpha;
        best_eps = eps;
      }
      break;
    }
  }
  if (best_k < 0) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "no (alpha, sigma2) reaches eps_trees = %g; closest achievable "
        "eps' = %g at sigma2 = %g",
        h.eps_trees, closest, grid.back()));
  }

  double sigma2 = grid[best_k];
  if (best_k > 0 && best_eps < kTolerance * h.eps_trees) {
    // Invariant: hi admissible, lo not.
    double lo = grid[best_k - 1], hi = grid[best_k];
    for (int step = 0; step < kBisectionSteps && hi / lo > 1 + 1e-12; ++step) {
      const double mid = std::sqrt(lo * hi);
      if (CandidateEpsilon(h, best_alpha, mid) <= h.eps_trees) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
    sigma2 = hi;
  }
  return make_plan(best_alpha, sigma2);
}

}  // namespace sgbdt
