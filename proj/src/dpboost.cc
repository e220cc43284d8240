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

#include "sgbdt/dpboost.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgbdt/gridless_exp_mech.h"
#include "sgbdt/random.h"
#include "sgbdt/rdp.h"
#include "sgbdt/sgbdt.h"

namespace sgbdt {
namespace {

// Greedy-by-exponential-mechanism tree on `rows` with private leaves.
absl::StatusOr<Tree> TrainDpBoostTree(const Dataset& data,
                                      std::span<const size_t> rows,
                                      std::span<const double> gradients,
                                      const Hyperparameters& h, int t,
                                      double eps_split_level, double eps_leaf,
                                      Rng& rng) {
  Tree tree(h.depth);
  std::vector<std::vector<size_t>> members(1);
  members[0].assign(rows.begin(), rows.end());
  size_t node = 0;
  for (int level = 0; level < h.depth; ++level) {
    std::vector<std::vector<size_t>> next;
    for (const std::vector<size_t>& idx : members) {
      const BucketSet buckets = BuildBuckets(data, idx, h.r);
      const UtilityFn utility =
          MakeMseGainUtility(data, idx, gradients, h.lambda, h.g_star);
      absl::StatusOr<SplitChoice> choice =
          GridlessExpMech(buckets, utility, eps_split_level, rng);
      if (!choice.ok()) return choice.status();
      Split& split = tree.splits()[node++];
      split.feature = choice->feature;
      split.value = choice->value;
      split.categorical = choice->categorical;
      std::vector<size_t> left, right;
      for (size_t i : idx) {
        (split.GoesLeft(data.at(i, split.feature)) ? left : right).push_back(i);
      }
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    members = std::move(next);
  }
  const double bound = h.g_star * std::pow(1.0 - h.eta, t - 1);
  const double scale =
      std::isinf(eps_leaf)
          ? 0.0
          : DpBoostLeafSensitivity(t, h.g_star, h.lambda, h.eta) / eps_leaf;
  for (size_t l = 0; l < members.size(); ++l) {
    double s = 0.0;
    for (size_t i : members[l]) s += Clip(gradients[i], h.g_star);
    const double v = -s / (members[l].size() + h.lambda);
    tree.leaves()[l] = Clip(v, bound) + SampleLaplace(rng, scale);
  }
  return tree;
}

}  // namespace

double GeometricLeafClip(double v, int t, double g_star, double eta) {
  return Clip(v, g_star * std::pow(1.0 - eta, t - 1));
}

std::vector<size_t> GdfFilter(std::span<const double> gradients,
                              double g_star) {
  std::vector<size_t> kept;
  for (size_t i = 0; i < gradients.size(); ++i) {
    if (std::fabs(gradients[i]) <= g_star) kept.push_back(i);
  }
  return kept;
}

double DpBoostLeafSensitivity(int t, double g_star, double lambda,
                              double eta) {
  return std::min(g_star / (1.0 + lambda),
                  2.0 * g_star * std::pow(1.0 - eta, t - 1));
}

nlohmann::json DpBoostManifest::ToJson() const {
  return {{"epsilon_init", epsilon_init},     {"epsilon_trees", epsilon_trees},
          {"epsilon_total", epsilon_total},   {"eps_leaf", eps_leaf},
          {"eps_split_level", eps_split_level}, {"tree_sizes", tree_sizes}};
}

absl::StatusOr<DpBoostResult> TrainDpBoost(const Dataset& data,
                                           const Hyperparameters& h,
                                           const DpBoostOptions& options,
                                           uint64_t seed) {
  if (absl::Status s = h.Validate(); !s.ok()) return s;
  if (options.num_ensembles < 1 || options.trees_per_ensemble < 1) {
    return absl::InvalidArgumentError("need >= 1 ensemble and tree");
  }
  const size_t n = data.size();
  if (n < static_cast<size_t>(options.trees_per_ensemble)) {
    return absl::InvalidArgumentError(
        "fewer training points than trees per inner ensemble");
  }
  const LossKind loss = LossForTask(data.task());
  DpBoostResult result;
  Ensemble& e = result.ensemble;
  e.eta = h.eta;
  e.loss = loss;
  DpBoostManifest& manifest = result.manifest;
  if (options.init_score && h.eps_init > 0) {
    Rng rng = MakeRng(DeriveSeed(seed, StreamTag::kInitNoise));
    absl::StatusOr<double> mean =
        DpInitScore(data.labels(), h.m_star, h.eps_init, h.init_noise, rng);
    if (!mean.ok()) return mean.status();
    e.init_score = InitScoreToRaw(loss, *mean);
    manifest.epsilon_init = InitScoreEpsilon(h.eps_init, h.init_noise);
  }
  const double eps_ensemble = h.eps_trees / options.num_ensembles;
  manifest.epsilon_trees = h.eps_trees;
  manifest.epsilon_total = manifest.epsilon_init + h.eps_trees;
  manifest.eps_leaf = eps_ensemble / 2.0;
  manifest.eps_split_level = eps_ensemble / 2.0 / h.depth;

  std::vector<double> raw(n, e.init_score), gradients(n);
  const size_t chunk = n / options.trees_per_ensemble;
  for (int k = 0; k < options.num_ensembles; ++k) {
    // Tree-structure randomness (and the partition) is independent of
    // whether the initial score is released.
    Rng partition_rng = MakeRng(DeriveSeed(seed, StreamTag::kPartition, {uint64_t(k)}));
    std::vector<size_t> pool(n);
    std::iota(pool.begin(), pool.end(), size_t{0});
    std::shuffle(pool.begin(), pool.end(), partition_rng);
    std::vector<std::vector<size_t>>& parts = result.partitions.emplace_back();
    for (int t = 1; t <= options.trees_per_ensemble; ++t) {
      for (size_t i = 0; i < n; ++i) {
        gradients[i] = Gradient(loss, data.label(i), raw[i]);
      }
      std::vector<size_t> rows;
      if (options.gdf) {
        // Take the next `chunk` eligible points; the rest wait in the pool.
        std::vector<size_t> remaining;
        for (size_t i : pool) {
          if (rows.size() < chunk && std::fabs(gradients[i]) <= h.g_star) {
            rows.push_back(i);
          } else {
            remaining.push_back(i);
          }
        }
        pool = std::move(remaining);
      } else {
        const size_t begin = static_cast<size_t>(t - 1) * chunk;
        rows.assign(pool.begin() + begin, pool.begin() + begin + chunk);
      }
      Rng rng = MakeRng(DeriveSeed(seed, StreamTag::kSplitSelection,
                                   {uint64_t(k), uint64_t(t)}));
      absl::StatusOr<Tree> tree =
          TrainDpBoostTree(data, rows, gradients, h, t,
                           manifest.eps_split_level, manifest.eps_leaf, rng);
      if (!tree.ok()) return tree.status();
      for (size_t i = 0; i < n; ++i) raw[i] += h.eta * tree->Evaluate(data.row(i));
      manifest.tree_sizes.push_back(rows.size());
      parts.push_back(std::move(rows));
      e.trees.push_back(*std::move(tree));
    }
  }
  return result;
}

}  // namespace sgbdt
