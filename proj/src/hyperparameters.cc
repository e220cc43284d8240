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

#include "sgbdt/hyperparameters.h"

#include <cmath>
#include <set>

#include "absl/strings/str_cat.h"

namespace sgbdt {
namespace {

const char* AdpConversionName(AdpConversion c) {
  switch (c) {
    case AdpConversion::kSimple:
      return "simple";
    case AdpConversion::kStandard:
      return "standard";
    case AdpConversion::kBalle:
      return "balle";
  }
  return "balle";
}

}  // namespace

absl::Status Hyperparameters::Validate() const {
  auto bad = [](const std::string& what) {
    return absl::InvalidArgumentError(absl::StrCat("hyperparameter ", what));
  };
  if (!(g_star > 0)) return bad("g_star must be > 0");
  if (!(m_star > 0)) return bad("m_star must be > 0");
  if (!(lambda > 0)) return bad("lambda must be > 0");
  if (!(eta > 0)) return bad("eta must be > 0");
  if (depth < 1 || depth > 20) return bad("depth must be in [1, 20]");
  if (!(gamma > 0 && gamma <= 1)) return bad("gamma must be in (0, 1]");
  if (t_regular < 0 || t_extra < 0) return bad("round counts must be >= 0");
  if (!(eps_init >= 0) || !std::isfinite(eps_init)) {
    return bad("eps_init must be finite and >= 0");
  }
  if (!(eps_trees > 0)) return bad("eps_trees must be > 0");
  if (!(delta_trees > 0 && delta_trees < 1)) {
    return bad("delta_trees must be in (0, 1)");
  }
  if (!(r1 > 0 && r2 > 0) || std::fabs(r1 + r2 - 1.0) > 1e-12) {
    return bad("r1, r2 must be positive and sum to 1");
  }
  if (!(r > 0)) return bad("r must be > 0");
  if (alpha_max < 2) return bad("alpha_max must be >= 2");
  if (loss_table_size < 1) return bad("loss_table_size must be >= 1");
  return absl::OkStatus();
}

nlohmann::json Hyperparameters::ToJson() const {
  return {
      {"g_star", g_star},
      {"m_star", m_star},
      {"lambda", lambda},
      {"eta", eta},
      {"depth", depth},
      {"gamma", gamma},
      {"t_regular", t_regular},
      {"t_extra", t_extra},
      {"eps_init", eps_init},
      {"eps_trees", eps_trees},
      {"delta_trees", delta_trees},
      {"r1", r1},
      {"r2", r2},
      {"r", r},
      {"alpha_max", alpha_max},
      {"use_filter", use_filter},
      {"use_init_score", use_init_score},
      {"leaf_noise", leaf_noise == LeafNoise::kDynamic ? "dynamic" : "static"},
      {"init_noise",
       init_noise == InitNoise::kWideScale ? "wide" : "narrow"},
      {"adp_conversion", AdpConversionName(adp_conversion)},
      {"subsampling_bound",
       subsampling_bound == SubsamplingBound::kGaussian ? "gaussian"
                                                        : "general"},
      {"loss_table_size", loss_table_size},
  };
}

absl::StatusOr<Hyperparameters> Hyperparameters::FromJson(
    const nlohmann::json& j) {
  Hyperparameters h;
  if (!j.is_object()) {
    return absl::InvalidArgumentError("hyperparameters must be an object");
  }
  static const std::set<std::string> kKnown = [] {
    std::set<std::string> keys;
    const nlohmann::json defaults = Hyperparameters().ToJson();
    for (const auto& item : defaults.items()) {
      keys.insert(item.key());
    }
    return keys;
  }();
  for (const auto& item : j.items()) {
    if (kKnown.count(item.key()) == 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown hyperparameter '", item.key(), "'"));
    }
  }
  try {
    h.g_star = j.value("g_star", h.g_star);
    h.m_star = j.value("m_star", h.m_star);
    h.lambda = j.value("lambda", h.lambda);
    h.eta = j.value("eta", h.eta);
    h.depth = j.value("depth", h.depth);
    h.gamma = j.value("gamma", h.gamma);
    h.t_regular = j.value("t_regular", h.t_regular);
    h.t_extra = j.value("t_extra", h.t_extra);
    h.eps_init = j.value("eps_init", h.eps_init);
    h.eps_trees = j.value("eps_trees", h.eps_trees);
    h.delta_trees = j.value("delta_trees", h.delta_trees);
    h.r1 = j.value("r1", h.r1);
    h.r2 = j.contains("r2") ? j.at("r2").get<double>() : 1.0 - h.r1;
    h.r = j.value("r", h.r);
    h.alpha_max = j.value("alpha_max", h.alpha_max);
    h.use_filter = j.value("use_filter", h.use_filter);
    h.use_init_score = j.value("use_init_score", h.use_init_score);
    h.loss_table_size = j.value("loss_table_size", h.loss_table_size);
    const std::string leaf = j.value("leaf_noise", "dynamic");
    if (leaf != "dynamic" && leaf != "static") {
      return absl::InvalidArgumentError("leaf_noise must be dynamic|static");
    }
    h.leaf_noise = leaf == "dynamic" ? LeafNoise::kDynamic : LeafNoise::kStatic;
    const std::string init = j.value("init_noise", "wide");
    if (init != "wide" && init != "narrow") {
      return absl::InvalidArgumentError("init_noise must be wide|narrow");
    }
    h.init_noise =
        init == "wide" ? InitNoise::kWideScale : InitNoise::kNarrowScale;
    const std::string adp = j.value("adp_conversion", "balle");
    if (adp == "simple") {
      h.adp_conversion = AdpConversion::kSimple;
    } else if (adp == "standard") {
      h.adp_conversion = AdpConversion::kStandard;
    } else if (adp == "balle") {
      h.adp_conversion = AdpConversion::kBalle;
    } else {
      return absl::InvalidArgumentError(
          "adp_conversion must be simple|standard|balle");
    }
    const std::string bound = j.value("subsampling_bound", "gaussian");
    if (bound != "gaussian" && bound != "general") {
      return absl::InvalidArgumentError(
          "subsampling_bound must be gaussian|general");
    }
    h.subsampling_bound = bound == "gaussian" ? SubsamplingBound::kGaussian
                                              : SubsamplingBound::kGeneral;
  } catch (const nlohmann::json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed hyperparameters: ", e.what()));
  }
  if (absl::Status s = h.Validate(); !s.ok()) return s;
  return h;
}

}  // namespace sgbdt
