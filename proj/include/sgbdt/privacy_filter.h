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

#ifndef SGBDT_PRIVACY_FILTER_H_
#define SGBDT_PRIVACY_FILTER_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "sgbdt/accountant.h"
#include "sgbdt/hyperparameters.h"

namespace sgbdt {

// Slope c of the per-round curve rho'(l) = c * l for a point with clipped
// gradient g. Dynamic leaves: (r1 + r2 g^2) / sigma2. Static leaves release
// only the sum, with variance chosen so that g = g* costs the same as in the
// dynamic case: g^2 (r1 + r2 g*^2) / (sigma2 g*^2).
double LeafLossSlope(const Hyperparameters& h, double sigma2, double g);

// Individual loss of one round for a point with clipped gradient g.
absl::StatusOr<double> PerPointLoss(int alpha, double g,
                                    const Hyperparameters& h, double sigma2);

// Per-point losses tabulated on a grid over |g| in [0, g*]. Lookups round |g|
// up to the next grid point, so (the loss being nondecreasing in |g|) a
// lookup never under-charges. The last entry is the plan's worst case.
class IndividualLossTable {
 public:
  IndividualLossTable(const Hyperparameters& h, const AccountantPlan& plan);

  double Lookup(double abs_g) const;
  double worst_case() const { return table_.back(); }

 private:
  double g_star_;
  std::vector<double> table_;
};

// Per-point RDP spent at a fixed order, gated by a common budget: a point
// takes part in a round iff spent + proposed <= budget. Points that do not
// take part are charged 0.
class PrivacyLedger {
 public:
  struct Round {
    std::vector<double> proposed;  // 0 for ineligible points
    std::vector<uint8_t> eligible;
    std::vector<uint8_t> active;
  };

  PrivacyLedger(size_t num_points, int alpha, double budget,
                bool keep_history = false);

  // Sparse form: points missing from `proposed` are not eligible this round.
  // Returns the active indices in increasing order.
  absl::StatusOr<std::vector<size_t>> FilterRound(
      std::span<const std::pair<size_t, double>> proposed);

  // Dense form; `eligible` may be empty (all eligible). Returns a 0/1 mask.
  absl::StatusOr<std::vector<uint8_t>> FilterRoundDense(
      std::span<const double> proposed, std::span<const uint8_t> eligible);

  size_t size() const { return spent_.size(); }
  int alpha() const { return alpha_; }
  double budget() const { return budget_; }
  double spent(size_t i) const { return spent_[i]; }
  const std::vector<double>& spent() const { return spent_; }
  double max_spent() const;
  int num_rounds() const { return static_cast<int>(round_charged_.size()); }
  const std::vector<double>& round_charged() const { return round_charged_; }
  const std::vector<size_t>& round_active() const { return round_active_; }
  const std::vector<Round>& history() const { return history_; }

  // Replays the stored history: every decision must match the threshold
  // test and the replayed sums must equal spent(). Needs keep_history.
  absl::Status VerifyReplay() const;

  // index,spent,remaining
  std::string ToCsv() const;
  absl::Status WriteCsv(const std::string& path) const;

  nlohmann::json SummaryJson(bool include_per_point) const;

 private:
  int alpha_;
  double budget_;
  bool keep_history_;
  std::vector<double> spent_;
  std::vector<double> round_charged_;
  std::vector<size_t> round_active_;
  std::vector<Round> history_;
};

// Checks a ledger summary (as produced by SummaryJson(true)): no point above
// budget, and per-round charges consistent with the per-point totals.
absl::Status VerifyLedgerSummary(const nlohmann::json& summary);

}  // namespace sgbdt

#endif  // SGBDT_PRIVACY_FILTER_H_
