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

#include "sgbdt/privacy_filter.h"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "sgbdt/rdp.h"

namespace sgbdt {
namespace {

// Both tests are needed: a tiny proposal can vanish in spent + proposed, so
// an exhausted point would pass the sum test alone.
bool Admits(double spent, double proposed, double budget) {
  return proposed <= budget - spent && spent + proposed <= budget;
}

}  // namespace

double LeafLossSlope(const Hyperparameters& h, double sigma2, double g) {
  const double g2 = g * g;
  if (h.leaf_noise == LeafNoise::kDynamic) return (h.r1 + h.r2 * g2) / sigma2;
  const double gs2 = h.g_star * h.g_star;
  return g2 * (h.r1 + h.r2 * gs2) / (sigma2 * gs2);
}

absl::StatusOr<double> PerPointLoss(int alpha, double g,
                                    const Hyperparameters& h, double sigma2) {
  if (std::fabs(g) > h.g_star) {
    return absl::InvalidArgumentError(
        absl::StrCat("gradient ", g, " exceeds clip bound ", h.g_star));
  }
  if (!(sigma2 > 0)) return absl::InvalidArgumentError("sigma2 must be > 0");
  return RdpSubsampledLinear(alpha, LeafLossSlope(h, sigma2, g), h.gamma,
                             h.subsampling_bound);
}

IndividualLossTable::IndividualLossTable(const Hyperparameters& h,
                                         const AccountantPlan& plan)
    : g_star_(h.g_star) {
  const int k = h.loss_table_size;
  table_.resize(k + 1);
  double running = 0.0;
  for (int j = 0; j < k; ++j) {
    const double g = h.g_star * j / k;
    running = std::max(running, RdpSubsampledLinear(
                                    plan.alpha_hat,
                                    LeafLossSlope(h, plan.sigma2_leaf, g),
                                    h.gamma, h.subsampling_bound));
    table_[j] = running;
  }
  table_[k] = std::max(running, plan.rho_per_round);
}

double IndividualLossTable::Lookup(double abs_g) const {
  const int k = static_cast<int>(table_.size()) - 1;
  if (!(abs_g > 0)) return table_[0];
  const double scaled = std::ceil(abs_g / g_star_ * k);
  const int j = scaled >= k ? k : static_cast<int>(scaled);
  return table_[j];
}

PrivacyLedger::PrivacyLedger(size_t num_points, int alpha, double budget,
                             bool keep_history)
    : alpha_(alpha),
      budget_(budget),
      keep_history_(keep_history),
      spent_(num_points, 0.0) {}

absl::StatusOr<std::vector<size_t>> PrivacyLedger::FilterRound(
    std::span<const std::pair<size_t, double>> proposed) {
  std::vector<double> dense(size(), 0.0);
  std::vector<uint8_t> eligible(size(), 0);
  for (const auto& [i, loss] : proposed) {
    if (i >= size()) {
      return absl::OutOfRangeError(absl::StrCat("unknown point index ", i));
    }
    dense[i] = loss;
    eligible[i] = 1;
  }
  absl::StatusOr<std::vector<uint8_t>> mask = FilterRoundDense(dense, eligible);
  if (!mask.ok()) return mask.status();
  std::vector<size_t> active;
  for (size_t i = 0; i < size(); ++i) {
    if ((*mask)[i]) active.push_back(i);
  }
  return active;
}

absl::StatusOr<std::vector<uint8_t>> PrivacyLedger::FilterRoundDense(
    std::span<const double> proposed, std::span<const uint8_t> eligible) {
  if (proposed.size() != size() ||
      (!eligible.empty() && eligible.size() != size())) {
    return absl::InvalidArgumentError("proposal size does not match ledger");
  }
  for (size_t i = 0; i < size(); ++i) {
    if (!(proposed[i] >= 0) || !std::isfinite(proposed[i])) {
      return absl::InvalidArgumentError(
          absl::StrCat("invalid proposed loss for point ", i));
    }
  }
  std::vector<uint8_t> active(size(), 0);
  double charged = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < size(); ++i) {
    if (!eligible.empty() && !eligible[i]) continue;
    if (Admits(spent_[i], proposed[i], budget_)) {
      spent_[i] += proposed[i];
      active[i] = 1;
      charged += proposed[i];
      ++count;
    }
  }
  round_charged_.push_back(charged);
  round_active_.push_back(count);
  if (keep_history_) {
    Round r;
    r.proposed.assign(proposed.begin(), proposed.end());
    if (eligible.empty()) {
      r.eligible.assign(size(), 1);
    } else {
      r.eligible.assign(eligible.begin(), eligible.end());
    }
    r.active = active;
    history_.push_back(std::move(r));
  }
  return active;
}

double PrivacyLedger::max_spent() const {
  return spent_.empty() ? 0.0 : *std::max_element(spent_.begin(), spent_.end());
}

absl::Status PrivacyLedger::VerifyReplay() const {
  if (!keep_history_) {
    return absl::FailedPreconditionError("ledger kept no history");
  }
  std::vector<double> replay(size(), 0.0);
  for (size_t t = 0; t < history_.size(); ++t) {
    const Round& r = history_[t];
    for (size_t i = 0; i < size(); ++i) {
      const bool pass =
          r.eligible[i] && Admits(replay[i], r.proposed[i], budget_);
      if (pass != static_cast<bool>(r.active[i])) {
        return absl::InternalError(absl::StrFormat(
            "round %d point %d: recorded decision disagrees with threshold",
            t, i));
      }
      if (pass) replay[i] += r.proposed[i];
    }
  }
  for (size_t i = 0; i < size(); ++i) {
    if (replay[i] != spent_[i]) {
      return absl::InternalError(absl::StrFormat(
          "point %d: replayed %.17g != spent %.17g", i, replay[i], spent_[i]));
    }
    if (replay[i] > budget_) {
      return absl::InternalError(
          absl::StrFormat("point %d exceeds the budget", i));
    }
  }
  return absl::OkStatus();
}

std::string PrivacyLedger::ToCsv() const {
  std::string out = "index,spent,remaining\n";
  for (size_t i = 0; i < size(); ++i) {
    absl::StrAppendFormat(&out, "%d,%.17g,%.17g\n", i, spent_[i],
                          budget_ - spent_[i]);
  }
  return out;
}

absl::Status PrivacyLedger::WriteCsv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) return absl::UnavailableError(absl::StrCat("cannot write ", path));
  out << ToCsv();
  return absl::OkStatus();
}

nlohmann::json PrivacyLedger::SummaryJson(bool include_per_point) const {
  nlohmann::json j;
  j["alpha"] = alpha_;
  j["budget"] = budget_;
  j["max_spent"] = max_spent();
  j["rounds"] = num_rounds();
  j["round_charged"] = round_charged_;
  j["round_active"] = round_active_;
  if (include_per_point) j["spent"] = spent_;
  return j;
}

absl::Status VerifyLedgerSummary(const nlohmann::json& summary) {
  try {
    const double budget = summary.at("budget").get<double>();
    const std::vector<double> spent =
        summary.at("spent").get<std::vector<double>>();
    const std::vector<double> charged =
        summary.at("round_charged").get<std::vector<double>>();
    double total_spent = 0.0, total_charged = 0.0, max_spent = 0.0;
    for (double s : spent) {
      if (s > budget) {
        return absl::InternalError(
            absl::StrFormat("spent %.17g exceeds budget %.17g", s, budget));
      }
      total_spent += s;
      max_spent = std::max(max_spent, s);
    }
    for (double c : charged) total_charged += c;
    if (max_spent != summary.at("max_spent").get<double>()) {
      return absl::InternalError("max_spent does not match per-point values");
    }
    const double scale = std::max(1.0, std::fabs(total_spent));
    if (std::fabs(total_spent - total_charged) > 1e-9 * scale) {
      return absl::InternalError(absl::StrFormat(
          "per-round charges %.17g disagree with per-point total %.17g",
          total_charged, total_spent));
    }
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed ledger summary: ", e.what()));
  }
  return absl::OkStatus();
}

}  // namespace sgbdt
