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

#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "checks.h"
#include "gtest/gtest.h"
#include "sgbdt/nonprivate.h"

namespace sgbdt {
namespace {

using testing::SyntheticData;
using testing::SyntheticSchema;

constexpr double kInf = std::numeric_limits<double>::infinity();

Hyperparameters Small() {
  Hyperparameters h;
  h.depth = 3;
  h.t_regular = 8;
  h.gamma = 0.3;
  h.eps_trees = 1.0;
  h.eps_init = 0.1;
  h.lambda = 2.0;
  h.eta = 0.3;
  return h;
}

TEST(DpInitScore, NoiseFreeExamples) {
  Rng rng = MakeRng(1);
  const std::vector<double> a = {1, 2, 3}, b = {10, 10};
  EXPECT_DOUBLE_EQ(*DpInitScore(a, 5.0, kInf, InitNoise::kWideScale, rng), 2.0);
  EXPECT_DOUBLE_EQ(*DpInitScore(b, 1.0, kInf, InitNoise::kNarrowScale, rng), 1.0);
  EXPECT_DOUBLE_EQ(*ClampedMean(b, 1.0), 1.0);
}

TEST(DpInitScore, ConcentratesAsBudgetGrows) {
  const std::vector<double> labels(100, 3.0);
  for (double eps : {0.1, 10.0, 1e6}) {
    Rng rng = MakeRng(7);
    double mad = 0.0;
    for (int i = 0; i < 2000; ++i) {
      mad += std::fabs(*DpInitScore(labels, 5.0, eps, InitNoise::kWideScale, rng) - 3.0);
    }
    // Laplace mean absolute deviation equals its scale 2 m* / (n eps).
    EXPECT_NEAR(mad / 2000, 10.0 / (100 * eps), 0.1 * 10.0 / (100 * eps));
  }
}

TEST(DpInitScore, Errors) {
  Rng rng = MakeRng(1);
  const std::vector<double> none, one = {1.0};
  EXPECT_FALSE(DpInitScore(none, 1.0, 1.0, InitNoise::kWideScale, rng).ok());
  EXPECT_FALSE(DpInitScore(one, 1.0, 0.0, InitNoise::kWideScale, rng).ok());
}

TEST(InitScoreToRaw, MapsMeanToLossScale) {
  EXPECT_EQ(InitScoreToRaw(LossKind::kSquaredError, 2.5), 2.5);
  EXPECT_NEAR(InitScoreToRaw(LossKind::kLogistic, 0.25), std::log(1.0 / 3.0), 1e-14);
  EXPECT_TRUE(std::isfinite(InitScoreToRaw(LossKind::kLogistic, -0.2)));
}

TEST(RandomTree, DepthOneHasOneSplitTwoLeaves) {
  PublicRandomness rng(3);
  const Tree t = RandomTree(1, *SyntheticSchema(Task::kRegression), 1.0, rng);
  EXPECT_EQ(t.num_splits(), 1u);
  EXPECT_EQ(t.num_leaves(), 2u);
}

TEST(RandomTree, ThresholdsInsideRange) {
  Schema schema;
  schema.label = "y";
  schema.features.push_back(*FeatureSpec::Numerical("x", 0.0, 1.0));
  PublicRandomness rng(5);
  for (int i = 0; i < 1000; ++i) {
    const Tree tree = RandomTree(4, schema, 1.0, rng);
    for (const Split& s : tree.splits()) {
      EXPECT_GE(s.value, 0.0);
      EXPECT_LT(s.value, 1.0);
    }
  }
}

TEST(RandomTree, NumericalWeightSetsFeatureFrequency) {
  Schema schema;
  schema.label = "y";
  schema.features.push_back(*FeatureSpec::Numerical("x", 0.0, 1.0));
  schema.features.push_back(*FeatureSpec::Categorical("c", {"u", "v"}));
  PublicRandomness rng(11);
  int numerical = 0;
  constexpr int kDraws = 100'000;
  for (int i = 0; i < kDraws; ++i) {
    numerical += RandomTree(1, schema, 2.0, rng).splits()[0].categorical ? 0 : 1;
  }
  EXPECT_NEAR(double(numerical) / kDraws, 2.0 / 3.0, 0.02);
}

TEST(PoissonSubsample, Extremes) {
  Rng rng = MakeRng(2);
  EXPECT_TRUE(PoissonSubsample(100, 0.0, rng).empty());
  std::vector<size_t> all(100);
  std::iota(all.begin(), all.end(), size_t{0});
  EXPECT_EQ(PoissonSubsample(100, 1.0, rng), all);
}

TEST(PoissonSubsample, SizeConcentrates) {
  Rng rng = MakeRng(9);
  const double n = 1e5, gamma = 0.3;
  const double sigma = std::sqrt(n * gamma * (1 - gamma));
  for (int rep = 0; rep < 5; ++rep) {
    EXPECT_NEAR(double(PoissonSubsample(size_t(n), gamma, rng).size()),
                n * gamma, 3 * sigma);
  }
}

TEST(DpLeaf, NoiseFreeExamples) {
  Rng rng = MakeRng(1);
  const std::vector<double> ten(10, -0.5), none, mixed = {2.0, -3.0};
  EXPECT_DOUBLE_EQ(std::fabs(DpLeaf(ten, 1.0, 0.0, 0.5, 0.5, 1.0, rng)), 0.5);
  EXPECT_EQ(DpLeaf(none, 1.0, 0.0, 0.5, 0.5, 1.0, rng), 0.0);
  EXPECT_EQ(DpLeaf(mixed, 1.0, 0.0, 0.5, 0.5, 0.1, rng), 0.0);
}

TEST(DpLeaf, MovesAgainstTheGradient) {
  Rng rng = MakeRng(1);
  const std::vector<double> positive(10, 0.5);
  EXPECT_DOUBLE_EQ(DpLeaf(positive, 1.0, 0.0, 0.5, 0.5, 1.0, rng), -0.5);
}

TEST(LeafNoise, DivergenceWithinBound) {
  for (const testing::LeafDivergenceCase& c :
       testing::EstimateLeafDivergences(1'000'000, 2024)) {
    EXPECT_LE(c.estimate, c.bound + 3 * c.standard_error)
        << "g=" << c.g << " r1=" << c.r1 << " sigma2=" << c.sigma2;
    // The Gaussian bound is exact, so the estimate should also be close.
    EXPECT_GE(c.estimate, c.bound - 5 * c.standard_error);
  }
}

TEST(LeafNoise, StaticModeMatchesWorstCaseOfDynamic) {
  Hyperparameters h;
  h.g_star = 0.5;
  h.r1 = 0.3;
  h.r2 = 0.7;
  h.leaf_noise = LeafNoise::kStatic;
  const LeafNoiseScale s = LeafNoiseFor(h, 2.0);
  EXPECT_EQ(s.support_stddev, 0.0);
  // Sum-only Gaussian with sensitivity g*: alpha g*^2 / (2 sd^2).
  EXPECT_NEAR(2 * 0.25 / (2 * s.sum_stddev * s.sum_stddev),
              2 * (0.3 + 0.7 * 0.25) / 2.0, 1e-12);
}

TEST(TrainSingleTree, NoiseFreeLimitMatchesNonprivateLeaves) {
  const Dataset data = SyntheticData(200, Task::kRegression, 4);
  Hyperparameters h = Small();
  h.depth = 1;
  h.gamma = 1.0;
  h.lambda = 1e-9;
  const std::vector<double> gradients(data.size(), 0.3);
  RoundContext ctx;
  ctx.h = &h;
  ctx.sigma2_leaf = 1e-24;
  ctx.dataset_size = data.size();
  ctx.seeds = RunSeeds::FromBase(5);
  const Tree tree = TrainSingleTree(data, gradients, {}, ctx);
  Tree oracle = tree;
  std::vector<size_t> all(data.size());
  std::iota(all.begin(), all.end(), size_t{0});
  FillLeavesExact(oracle, data, gradients, all, h.lambda);
  for (size_t l = 0; l < tree.num_leaves(); ++l) {
    EXPECT_NEAR(tree.leaves()[l], oracle.leaves()[l], 1e-8);
    EXPECT_NEAR(tree.leaves()[l], -0.3, 1e-8);
  }
}

TEST(TrainSingleTree, EmptySubsampleGivesNoiseOnlyLeaves) {
  const Dataset data = SyntheticData(50, Task::kRegression, 4);
  Hyperparameters h = Small();
  h.gamma = 0.0;
  const std::vector<double> gradients(data.size(), 1.0);
  RoundContext ctx;
  ctx.h = &h;
  ctx.sigma2_leaf = 1.0;
  ctx.dataset_size = data.size();
  ctx.seeds = RunSeeds::FromBase(5);
  std::vector<LeafAccumulator> leaves;
  const Tree tree = TrainSingleTree(data, gradients, {}, ctx, &leaves);
  EXPECT_EQ(tree.num_leaves(), 8u);
  for (size_t l = 0; l < leaves.size(); ++l) {
    EXPECT_EQ(leaves[l].n, 0.0);
    EXPECT_GE(leaves[l].n_noisy, h.lambda);
    EXPECT_DOUBLE_EQ(tree.leaves()[l], -leaves[l].s_noisy / leaves[l].n_noisy);
  }
}

TEST(TrainSingleTree, InactivePointsNeverReachLeaves) {
  const Dataset data = SyntheticData(50, Task::kRegression, 4);
  Hyperparameters h = Small();
  h.gamma = 1.0;
  const std::vector<double> gradients(data.size(), 1.0);
  const std::vector<uint8_t> none(data.size(), 0);
  RoundContext ctx;
  ctx.h = &h;
  ctx.sigma2_leaf = 1e-24;
  ctx.dataset_size = data.size();
  const Tree tree = TrainSingleTree(data, gradients, none, ctx);
  for (double v : tree.leaves()) EXPECT_NEAR(v, 0.0, 1e-10);
}

TEST(TrainSgbdt, DeterministicGivenSeed) {
  const Dataset data = SyntheticData(120, Task::kClassification, 8);
  const TrainResult a = *TrainSgbdt(data, Small(), 42);
  const TrainResult b = *TrainSgbdt(data, Small(), 42);
  EXPECT_EQ(a.ensemble.ToJson().dump(), b.ensemble.ToJson().dump());
  const TrainResult c = *TrainSgbdt(data, Small(), 43);
  EXPECT_NE(a.ensemble.ToJson().dump(), c.ensemble.ToJson().dump());
}

TEST(TrainSgbdt, NoRoundsIsInitScoreOnly) {
  const Dataset data = SyntheticData(120, Task::kRegression, 8);
  Hyperparameters h = Small();
  h.t_regular = 0;
  h.t_extra = 0;
  const TrainResult r = *TrainSgbdt(data, h, 1);
  EXPECT_TRUE(r.ensemble.trees.empty());
  EXPECT_EQ(r.ensemble.PredictRaw(data.row(0)), r.manifest.init_score);
}

TEST(TrainSgbdt, EveryTreeIsComplete) {
  const Dataset data = SyntheticData(120, Task::kRegression, 8);
  Hyperparameters h = Small();
  h.t_extra = 4;
  const TrainResult r = *TrainSgbdt(data, h, 1);
  ASSERT_EQ(r.ensemble.trees.size(), 12u);
  for (const Tree& t : r.ensemble.trees) EXPECT_EQ(t.num_leaves(), 8u);
}

TEST(TrainSgbdt, LedgerReplaysAndStaysWithinBudget) {
  const Dataset data = SyntheticData(150, Task::kRegression, 8);
  Hyperparameters h = Small();
  h.t_regular = 10;
  h.t_extra = 30;
  h.g_star = 0.5;
  TrainOptions options;
  options.keep_history = true;
  const TrainResult r = *TrainSgbdt(data, h, 3, options);
  ASSERT_TRUE(r.ledger.has_value());
  EXPECT_TRUE(r.ledger->VerifyReplay().ok());
  EXPECT_LE(r.ledger->max_spent(), r.manifest.plan.rho_budget);
  EXPECT_TRUE(VerifyLedgerSummary(r.manifest.ledger).ok());
  // Extra rounds only run on points with budget left, so some drop out.
  EXPECT_LT(r.ledger->round_active().back(), data.size());
}

TEST(TrainSgbdt, ReportedEpsilonAddsInitBudget) {
  const Dataset data = SyntheticData(150, Task::kRegression, 8);
  const TrainResult r = *TrainSgbdt(data, Small(), 3);
  EXPECT_LE(r.manifest.plan.epsilon_reported, 1.0);
  EXPECT_NEAR(r.manifest.epsilon_total,
              r.manifest.epsilon_init + r.manifest.plan.epsilon_reported, 1e-12);
  EXPECT_GT(r.manifest.epsilon_init, 0.0);
}

TEST(TrainSgbdt, LeafNoiseModeNeverChangesStructure) {
  const Dataset data = SyntheticData(150, Task::kRegression, 8);
  Hyperparameters h = Small();
  const TrainResult dynamic = *TrainSgbdt(data, h, 17);
  h.leaf_noise = LeafNoise::kStatic;
  const TrainResult fixed = *TrainSgbdt(data, h, 17);
  ASSERT_EQ(dynamic.ensemble.trees.size(), fixed.ensemble.trees.size());
  for (size_t t = 0; t < dynamic.ensemble.trees.size(); ++t) {
    EXPECT_TRUE(dynamic.ensemble.trees[t].SameStructure(fixed.ensemble.trees[t]));
  }
}

TEST(TrainSgbdt, StructureIndependentOfData) {
  const testing::CheckResult r = testing::CheckStructureSeparation(100);
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(TrainSgbdt, LateArrivalsSkipEarlyRounds) {
  const Dataset data = SyntheticData(100, Task::kRegression, 8);
  Hyperparameters h = Small();
  h.t_regular = 5;
  h.t_extra = 5;
  TrainOptions options;
  options.keep_history = true;
  options.arrival_round.assign(data.size(), 0);
  for (size_t i = 50; i < data.size(); ++i) options.arrival_round[i] = 5;
  const TrainResult r = *TrainSgbdt(data, h, 3, options);
  for (int t = 0; t < 5; ++t) {
    for (size_t i = 50; i < data.size(); ++i) {
      EXPECT_EQ(r.ledger->history()[t].eligible[i], 0);
    }
  }
}

TEST(TrainSgbdt, RejectsEmptyData) {
  Dataset empty(SyntheticSchema(Task::kRegression));
  EXPECT_FALSE(TrainSgbdt(empty, Small(), 1).ok());
}

}  // namespace
}  // namespace sgbdt
