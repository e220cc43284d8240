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

#include "sgbdt/sgbdt.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "sgbdt/loss.h"
#include "sgbdt/rdp.h"

namespace sgbdt {
namespace {

// Post-processing clamp before taking the logit of a private label mean.
constexpr double kMinProbability = 1e-4;

}  // namespace

absl::StatusOr<double> ClampedMean(std::span<const double> labels,
                                   double m_star) {
  if (labels.empty()) return absl::InvalidArgumentError("no labels");
  double sum = 0.0;
  for (double y : labels) sum += Clip(y, m_star);
  return sum / labels.size();
}

absl::StatusOr<double> DpInitScore(std::span<const double> labels,
                                   double m_star, double eps_init,
                                   InitNoise mode, Rng& rng) {
  if (!(eps_init > 0)) return absl::InvalidArgumentError("eps_init must be > 0");
  absl::StatusOr<double> mean = ClampedMean(labels, m_star);
  if (!mean.ok()) return mean.status();
  const double numerator = mode == InitNoise::kWideScale ? 2.0 * m_star : m_star;
  const double scale = numerator / (labels.size() * eps_init);
  return *mean + SampleLaplace(rng, scale);
}

double InitScoreToRaw(LossKind loss, double mean) {
  if (loss == LossKind::kSquaredError) return mean;
  return Logit(std::clamp(mean, kMinProbability, 1.0 - kMinProbability));
}

double TotalFeatureWeight(const Schema& schema, double r) {
  double w = 0.0;
  for (const FeatureSpec& f : schema.features) w += f.is_numerical() ? r : 1.0;
  return w;
}

int FeatureFromUniform(double u, const Schema& schema, double r) {
  double cumulative = 0.0;
  const int m = schema.num_features();
  for (int i = 0; i < m; ++i) {
    cumulative += schema.features[i].is_numerical() ? r : 1.0;
    if (u < cumulative) return i;
  }
  return m - 1;  // u rounded up to W
}

Tree RandomTree(int depth, const Schema& schema, double r,
                PublicRandomness& rng) {
  Tree tree(depth);
  const double total = TotalFeatureWeight(schema, r);
  for (Split& split : tree.splits()) {
    split.feature = FeatureFromUniform(rng.Uniform(0.0, total), schema, r);
    const FeatureSpec& f = schema.features[split.feature];
    if (f.is_numerical()) {
      split.categorical = false;
      split.value = rng.Uniform(f.min(), f.max());
    } else {
      split.categorical = true;
      const int k = static_cast<int>(rng.Uniform(0.0, f.num_values()));
      split.value = std::min(k, f.num_values() - 1);
    }
  }
  return tree;
}

std::vector<size_t> PoissonSubsample(size_t n, double gamma, Rng& rng) {
  std::vector<size_t> out;
  for (size_t i = 0; i < n; ++i) {
    if (SampleBernoulli(rng, gamma)) out.push_back(i);
  }
  return out;
}

void LeafAccumulator::Add(double gradient, double g_star) {
  n += 1.0;
  s += Clip(gradient, g_star);
}

LeafNoiseScale LeafNoiseFor(const Hyperparameters& h, double sigma2) {
  LeafNoiseScale scale;
  if (h.leaf_noise == LeafNoise::kDynamic) {
    scale.support_stddev = std::sqrt(sigma2 / (2.0 * h.r1));
    scale.sum_stddev = std::sqrt(sigma2 / (2.0 * h.r2));
  } else {
    // Same worst-case RDP as the dynamic release, all of it on the sum.
    const double gs2 = h.g_star * h.g_star;
    scale.sum_stddev = std::sqrt(sigma2 * gs2 / (2.0 * (h.r1 + h.r2 * gs2)));
  }
  return scale;
}

double ReleaseLeaf(LeafAccumulator& leaf, double support_noise,
                   double sum_noise, double lambda) {
  leaf.n_noisy = std::max(lambda, leaf.n + support_noise);
  leaf.s_noisy = leaf.s + sum_noise;
  // Leaves move against the gradient.
  return -leaf.s_noisy / leaf.n_noisy;
}

double ReleaseStaticLeaf(LeafAccumulator& leaf, double sum_noise,
                         double expected_support, double lambda) {
  leaf.n_noisy = std::max(lambda, expected_support);
  leaf.s_noisy = leaf.s + sum_noise;
  return -leaf.s_noisy / leaf.n_noisy;
}

double DpLeaf(std::span<const double> gradients, double g_star, double sigma2,
              double r1, double r2, double lambda, Rng& rng) {
  LeafAccumulator leaf;
  for (double g : gradients) leaf.Add(g, g_star);
  const double support_noise = SampleGaussian(rng, std::sqrt(sigma2 / (2 * r1)));
  const double sum_noise = SampleGaussian(rng, std::sqrt(sigma2 / (2 * r2)));
  return ReleaseLeaf(leaf, support_noise, sum_noise, lambda);
}

RunSeeds RunSeeds::FromBase(uint64_t base) {
  RunSeeds seeds;
  seeds.structure = DeriveSeed(base, StreamTag::kStructure);
  seeds.subsample = DeriveSeed(base, StreamTag::kSubsample);
  seeds.leaf_noise = DeriveSeed(base, StreamTag::kLeafNoise);
  seeds.init_noise = DeriveSeed(base, StreamTag::kInitNoise);
  return seeds;
}

void FillLeaves(Tree& tree, const Dataset& data,
                std::span<const double> gradients,
                std::span<const size_t> sampled, const RoundContext& ctx,
                std::vector<LeafAccumulator>* leaves) {
  const Hyperparameters& h = *ctx.h;
  std::vector<LeafAccumulator> acc(tree.num_leaves());
  for (size_t i : sampled) acc[tree.LeafIndex(data.row(i))].Add(gradients[i], h.g_star);

  const LeafNoiseScale scale = LeafNoiseFor(h, ctx.sigma2_leaf);
  const double expected_support =
      h.gamma * static_cast<double>(ctx.dataset_size) / tree.num_leaves();
  for (size_t l = 0; l < acc.size(); ++l) {
    // Every leaf, occupied or not, draws from its own substream.
    Rng rng = MakeRng(DeriveSeed(ctx.seeds.leaf_noise,
                                 {static_cast<uint64_t>(ctx.round), l}));
    if (h.leaf_noise == LeafNoise::kDynamic) {
      const double support_noise = SampleGaussian(rng, scale.support_stddev);
      const double sum_noise = SampleGaussian(rng, scale.sum_stddev);
      tree.leaves()[l] = ReleaseLeaf(acc[l], support_noise, sum_noise, h.lambda);
    } else {
      const double sum_noise = SampleGaussian(rng, scale.sum_stddev);
      tree.leaves()[l] =
          ReleaseStaticLeaf(acc[l], sum_noise, expected_support, h.lambda);
    }
  }
  if (leaves != nullptr) *leaves = std::move(acc);
}

Tree TrainSingleTree(const Dataset& data, std::span<const double> gradients,
                     std::span<const uint8_t> active, const RoundContext& ctx,
                     std::vector<LeafAccumulator>* leaves) {
  const Hyperparameters& h = *ctx.h;
  const uint64_t round = static_cast<uint64_t>(ctx.round);
  // One Bernoulli draw per point whether or not it is active, so the draws
  // of a point never depend on other points' filter state.
  Rng sample_rng = MakeRng(DeriveSeed(ctx.seeds.subsample, {round}));
  std::vector<size_t> sampled;
  for (size_t i = 0; i < data.size(); ++i) {
    const bool pick = SampleBernoulli(sample_rng, h.gamma);
    if (pick && (active.empty() || active[i])) sampled.push_back(i);
  }
  PublicRandomness structure(DeriveSeed(ctx.seeds.structure, {round}));
  Tree tree = RandomTree(h.depth, data.schema(), h.r, structure);
  FillLeaves(tree, data, gradients, sampled, ctx, leaves);
  return tree;
}

nlohmann::json RunManifest::ToJson() const {
  nlohmann::json j;
  j["plan"] = plan.ToJson();
  j["init_score"] = init_score;
  j["epsilon_init"] = epsilon_init;
  j["epsilon_total"] = epsilon_total;
  j["delta"] = delta;
  j["round_sampled"] = round_sampled;
  j["ledger"] = ledger;
  return j;
}

absl::StatusOr<TrainResult> TrainSgbdt(const Dataset& data,
                                       const Hyperparameters& h, uint64_t seed,
                                       const TrainOptions& options) {
  if (absl::Status s = h.Validate(); !s.ok()) return s;
  absl::StatusOr<AccountantPlan> plan = Initialize(h);
  if (!plan.ok()) return plan.status();
  if (data.empty()) return absl::InvalidArgumentError("empty training set");
  const size_t n = data.size();
  if (!options.arrival_round.empty() && options.arrival_round.size() != n) {
    return absl::InvalidArgumentError("arrival_round size mismatch");
  }
  const RunSeeds seeds = RunSeeds::FromBase(seed);
  const LossKind loss = LossForTask(data.task());

  TrainResult result;
  RunManifest& manifest = result.manifest;
  manifest.plan = *plan;
  manifest.delta = h.delta_trees;
  Ensemble& ensemble = result.ensemble;
  ensemble.eta = h.eta;
  ensemble.loss = loss;

  if (h.use_init_score && h.eps_init > 0) {
    // Only points present from the start contribute to the initial score.
    std::vector<double> labels;
    for (size_t i = 0; i < n; ++i) {
      if (options.arrival_round.empty() || options.arrival_round[i] <= 0) {
        labels.push_back(data.label(i));
      }
    }
    Rng rng = MakeRng(seeds.init_noise);
    absl::StatusOr<double> mean =
        DpInitScore(labels, h.m_star, h.eps_init, h.init_noise, rng);
    if (!mean.ok()) return mean.status();
    ensemble.init_score = InitScoreToRaw(loss, *mean);
    manifest.epsilon_init = InitScoreEpsilon(h.eps_init, h.init_noise);
  }
  manifest.init_score = ensemble.init_score;
  manifest.epsilon_total = manifest.epsilon_init + plan->epsilon_reported;

  const IndividualLossTable table(h, *plan);
  PrivacyLedger ledger(n, plan->alpha_hat, plan->rho_budget,
                       options.keep_history);
  std::vector<double> raw(n, ensemble.init_score);
  std::vector<double> gradients(n);
  std::vector<double> proposed(n);
  std::vector<uint8_t> eligible(n, 1);

  RoundContext ctx;
  ctx.h = &h;
  ctx.sigma2_leaf = plan->sigma2_leaf;
  ctx.dataset_size = n;
  ctx.seeds = seeds;
  for (int t = 0; t < h.total_rounds(); ++t) {
    for (size_t i = 0; i < n; ++i) {
      gradients[i] = Clip(Gradient(loss, data.label(i), raw[i]), h.g_star);
      proposed[i] = table.Lookup(std::fabs(gradients[i]));
      if (!options.arrival_round.empty()) {
        eligible[i] = options.arrival_round[i] <= t;
      }
    }
    absl::StatusOr<std::vector<uint8_t>> active =
        ledger.FilterRoundDense(proposed, eligible);
    if (!active.ok()) return active.status();

    ctx.round = t;
    std::vector<LeafAccumulator> leaves;
    Tree tree = TrainSingleTree(data, gradients, *active, ctx, &leaves);
    double sampled = 0.0;
    for (const LeafAccumulator& leaf : leaves) sampled += leaf.n;
    manifest.round_sampled.push_back(static_cast<size_t>(sampled));
    for (size_t i = 0; i < n; ++i) raw[i] += h.eta * tree.Evaluate(data.row(i));
    ensemble.trees.push_back(std::move(tree));
  }
  manifest.ledger = ledger.SummaryJson(/*include_per_point=*/true);
  if (options.keep_history) result.ledger = std::move(ledger);
  return result;
}

}  // namespace sgbdt
