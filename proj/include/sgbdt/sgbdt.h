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

#ifndef SGBDT_SGBDT_H_
#define SGBDT_SGBDT_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "sgbdt/accountant.h"
#include "sgbdt/dataset.h"
#include "sgbdt/ensemble.h"
#include "sgbdt/hyperparameters.h"
#include "sgbdt/privacy_filter.h"
#include "sgbdt/random.h"
#include "sgbdt/tree.h"

namespace sgbdt {

// Mean of labels clamped to [-m*, m*].
absl::StatusOr<double> ClampedMean(std::span<const double> labels,
                                   double m_star);

// Clamped label mean plus Laplace noise of scale 2 m* / (n eps_init)
// (kWideScale) or m* / (n eps_init) (kNarrowScale).
absl::StatusOr<double> DpInitScore(std::span<const double> labels,
                                   double m_star, double eps_init,
                                   InitNoise mode, Rng& rng);

// Data-independent complete tree. Each split picks feature i with
// probability proportional to r (numerical) or 1 (categorical), then a
// threshold uniform over the numerical border or a uniform category.
Tree RandomTree(int depth, const Schema& schema, double r,
                PublicRandomness& rng);

// Feature index for a uniform draw u in [0, W), W the total feature weight.
int FeatureFromUniform(double u, const Schema& schema, double r);
double TotalFeatureWeight(const Schema& schema, double r);

// Independent Bernoulli(gamma) inclusion of indices 0..n-1.
std::vector<size_t> PoissonSubsample(size_t n, double gamma, Rng& rng);

// Per-leaf statistics before and after noise.
struct LeafAccumulator {
  double n = 0.0;        // support
  double s = 0.0;        // clipped gradient sum
  double n_noisy = 0.0;  // max(lambda, n + noise)
  double s_noisy = 0.0;

  void Add(double gradient, double g_star);
};

// Noise standard deviations for one leaf release.
struct LeafNoiseScale {
  double support_stddev = 0.0;
  double sum_stddev = 0.0;
};
LeafNoiseScale LeafNoiseFor(const Hyperparameters& h, double sigma2);

// Releases a dynamic-noise leaf from given noise draws and returns the leaf
// value -s_noisy / n_noisy. Split from DpLeaf so tests can pin the noise.
double ReleaseLeaf(LeafAccumulator& leaf, double support_noise,
                   double sum_noise, double lambda);

// Dynamic leaf with Gaussian noise of variance sigma2 / (2 r1) on the support
// and sigma2 / (2 r2) on the sum.
double DpLeaf(std::span<const double> gradients, double g_star, double sigma2,
              double r1, double r2, double lambda, Rng& rng);

// Static leaf: -(s + noise) / max(lambda, expected_support).
double ReleaseStaticLeaf(LeafAccumulator& leaf, double sum_noise,
                         double expected_support, double lambda);

// Seeds of one training run. Structure seeds are shared in multi-party runs;
// the noise seeds are private to each party.
struct RunSeeds {
  uint64_t structure = 0;
  uint64_t subsample = 0;
  uint64_t leaf_noise = 0;
  uint64_t init_noise = 0;

  static RunSeeds FromBase(uint64_t base);
};

// Everything a single round needs besides the data.
struct RoundContext {
  const Hyperparameters* h = nullptr;
  double sigma2_leaf = 0.0;
  size_t dataset_size = 0;  // public n for the static-leaf denominator
  int round = 0;
  RunSeeds seeds;
};

// Trains one tree on the Poisson subsample of the active points. `gradients`
// are the clipped gradients of all points under the current ensemble.
// Optionally reports the per-leaf accumulators.
Tree TrainSingleTree(const Dataset& data, std::span<const double> gradients,
                     std::span<const uint8_t> active, const RoundContext& ctx,
                     std::vector<LeafAccumulator>* leaves = nullptr);

// Leaf values only: routes the sampled points through `tree` and fills its
// leaves with private values.
void FillLeaves(Tree& tree, const Dataset& data,
                std::span<const double> gradients,
                std::span<const size_t> sampled, const RoundContext& ctx,
                std::vector<LeafAccumulator>* leaves);

struct TrainOptions {
  // Per-point round at which the point becomes available (stream setting);
  // empty means every point is present from round 0.
  std::vector<int> arrival_round;
  // Keep the full per-round ledger history (memory n * rounds).
  bool keep_history = false;
};

struct RunManifest {
  AccountantPlan plan;
  double init_score = 0.0;
  double epsilon_init = 0.0;   // pure-DP epsilon of the initial score
  double epsilon_total = 0.0;  // epsilon_init + plan.epsilon_reported
  double delta = 0.0;
  std::vector<size_t> round_sampled;
  nlohmann::json ledger;

  nlohmann::json ToJson() const;
};

struct TrainResult {
  Ensemble ensemble;
  RunManifest manifest;
  std::optional<PrivacyLedger> ledger;  // set when keep_history
};

// Full private training loop. Accountant infeasibility is reported before
// any data is touched.
absl::StatusOr<TrainResult> TrainSgbdt(const Dataset& data,
                                       const Hyperparameters& h, uint64_t seed,
                                       const TrainOptions& options = {});

// Clips x to [-bound, bound].
inline double Clip(double x, double bound) {
  return x > bound ? bound : (x < -bound ? -bound : x);
}

// Converts a released label mean to the raw-score initial value.
double InitScoreToRaw(LossKind loss, double mean);

}  // namespace sgbdt

#endif  // SGBDT_SGBDT_H_
