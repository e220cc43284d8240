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

#include "checks.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "absl/strings/str_format.h"
#include "sgbdt/distributed.h"
#include "sgbdt/gridless_exp_mech.h"
#include "sgbdt/nonprivate.h"
#include "sgbdt/random.h"
#include "sgbdt/rdp.h"
#include "sgbdt/sgbdt.h"

namespace sgbdt::testing {
namespace {

using boost::math::quadrature::gauss_kronrod;
using HighPrecision = boost::multiprecision::cpp_dec_float_50;

constexpr double kQuadratureTolerance = 1e-14;

template <typename F>
double Integrate(F f, double a, double b) {
  return gauss_kronrod<double, 61>::integrate(f, a, b, 20,
                                               kQuadratureTolerance);
}

// Log-density of N(mean, var) at x.
double LogNormal(double x, double mean, double var) {
  const double z = x - mean;
  return -0.5 * z * z / var - 0.5 * std::log(2.0 * M_PI * var);
}

double Rel(double got, double want) {
  return want == 0.0 ? std::fabs(got) : std::fabs(got - want) / std::fabs(want);
}

}  // namespace

double RenyiGaussQuadrature(int alpha, std::span<const double> s,
                            std::span<const double> r, double sigma2) {
  const size_t dim = s.size();
  std::vector<double> var(dim);
  for (size_t d = 0; d < dim; ++d) var[d] = sigma2 / (r[d] * dim);
  const double a = alpha;
  // Integrand p^a q^(1-a), a Gaussian bump centred at (1 - a) s per axis.
  auto log_integrand = [&](std::span<const double> x) {
    double lp = 0.0, lq = 0.0;
    for (size_t d = 0; d < dim; ++d) {
      lp += LogNormal(x[d], 0.0, var[d]);
      lq += LogNormal(x[d], s[d], var[d]);
    }
    return a * lp + (1.0 - a) * lq;
  };
  auto range = [&](size_t d) {
    const double c = (1.0 - a) * s[d];
    const double w = 40.0 * std::sqrt(var[d]);
    return std::pair<double, double>{c - w, c + w};
  };
  double integral = 0.0;
  if (dim == 1) {
    const auto [lo, hi] = range(0);
    integral = Integrate(
        [&](double x) { return std::exp(log_integrand({&x, 1})); }, lo, hi);
  } else {
    const auto [lo0, hi0] = range(0);
    const auto [lo1, hi1] = range(1);
    integral = Integrate(
        [&](double x0) {
          return Integrate(
              [&](double x1) {
                const double x[2] = {x0, x1};
                return std::exp(log_integrand(x));
              },
              lo1, hi1);
        },
        lo0, hi0);
  }
  return std::log(integral) / (a - 1.0);
}

double RenyiLaplaceQuadrature(int alpha, double t) {
  const double a = alpha;
  auto f = [&](double x) {
    const double lp = -std::fabs(x) - std::log(2.0);
    const double lq = -std::fabs(x - t) - std::log(2.0);
    return std::exp(a * lp + (1.0 - a) * lq);
  };
  const double lo = std::min(0.0, t), hi = std::max(0.0, t);
  double integral = Integrate(f, lo - 80.0, lo) + Integrate(f, hi, hi + 80.0);
  if (hi > lo) integral += Integrate(f, lo, hi);
  return std::log(integral) / (a - 1.0);
}

double SubsampledHighPrecision(int alpha, std::span<const double> rho_prime,
                               double gamma, SubsamplingBound bound) {
  const HighPrecision g(gamma);
  const HighPrecision one(1);
  const HighPrecision c_high(bound == SubsamplingBound::kGeneral ? 3 : 1);
  const HighPrecision a(alpha);
  HighPrecision sum = pow(one - g, alpha - 1) * (a * g - g + one);
  HighPrecision binom = one;  // C(alpha, l), updated incrementally
  for (int l = 1; l <= alpha; ++l) {
    binom = binom * HighPrecision(alpha - l + 1) / HighPrecision(l);
    if (l < 2) continue;
    const HighPrecision e = exp(HighPrecision(l - 1) * HighPrecision(rho_prime[l - 2]));
    const HighPrecision c = l == 2 ? one : c_high;
    sum += c * binom * pow(one - g, alpha - l) * pow(g, l) * e;
  }
  return static_cast<double>(log(sum) / HighPrecision(alpha - 1));
}

CheckResult CheckAccountantOracles() {
  struct GaussCase {
    int alpha;
    std::vector<double> s, r;
    double sigma2;
  };
  const std::vector<GaussCase> gauss = {
      {2, {1.0}, {1.0}, 1.0},          {3, {1.0}, {1.0}, 2.0},
      {8, {0.5}, {1.0}, 4.0},          {2, {0.3}, {1.0}, 0.5},
      {3, {2.0}, {1.0}, 10.0},         {8, {0.1}, {1.0}, 0.2},
      {2, {1.0, 0.2}, {0.5, 0.5}, 1.0}, {3, {1.0, 0.5}, {0.2, 0.8}, 2.0},
      {8, {1.0, 1.0}, {0.1, 0.9}, 20.0}, {2, {1.0, 0.0}, {0.3, 0.7}, 1.5},
      {3, {0.0, 1.0}, {0.5, 0.5}, 3.0}, {8, {0.5, 0.25}, {0.6, 0.4}, 5.0},
      {2, {1.0, 3.0}, {0.9, 0.1}, 8.0}, {3, {1.0, 0.1}, {0.05, 0.95}, 4.0},
      {8, {1.0, 0.5}, {0.5, 0.5}, 50.0}, {2, {0.7}, {1.0}, 0.3},
      {3, {1.0, 2.0}, {0.25, 0.75}, 6.0}, {8, {0.2, 0.2}, {0.5, 0.5}, 0.5},
      {2, {1.0, 1.0}, {0.5, 0.5}, 0.8}, {3, {0.4, 1.2}, {0.7, 0.3}, 1.0},
  };
  double worst_gauss = 0.0;
  for (const GaussCase& c : gauss) {
    const double got = *RdpGaussNonspherical(c.alpha, c.s, c.r, c.sigma2);
    const double want = RenyiGaussQuadrature(c.alpha, c.s, c.r, c.sigma2);
    worst_gauss = std::max(worst_gauss, Rel(got, want));
  }

  double worst_sub = 0.0;
  for (SubsamplingBound bound :
       {SubsamplingBound::kGeneral, SubsamplingBound::kGaussian}) {
    for (int alpha : {2, 3, 4, 8, 16, 64}) {
      for (double gamma : {1e-4, 0.01, 0.1, 0.5, 1.0}) {
        for (double slope : {1e-6, 0.001, 0.05, 0.3}) {
          std::vector<double> curve;
          for (int l = 2; l <= alpha; ++l) curve.push_back(slope * l);
          const double want =
              SubsampledHighPrecision(alpha, curve, gamma, bound);
          const double got = RdpSubsampledLinear(alpha, slope, gamma, bound);
          worst_sub = std::max(worst_sub, Rel(got, want));
        }
      }
    }
  }

  double worst_adp = 0.0;
  for (int alpha : {2, 3, 10, 64, 512}) {
    for (double rho : {0.0, 1e-3, 0.5, 1.0, 7.0}) {
      for (double delta : {1e-10, 1e-5, 1e-2}) {
        const double eps = *RdpToAdp(alpha, rho, delta);
        const double back = std::exp(rho - alpha * eps);
        worst_adp = std::max(worst_adp, Rel(back, delta));
      }
    }
  }
  CheckResult result;
  result.passed = worst_gauss <= 1e-6 && worst_sub <= 1e-10 && worst_adp <= 1e-12;
  result.detail = absl::StrFormat(
      "gauss_rel=%.2e (<=1e-6, 20 cases) subsampled_rel=%.2e (<=1e-10) "
      "adp_roundtrip_rel=%.2e (<=1e-12)",
      worst_gauss, worst_sub, worst_adp);
  return result;
}

std::vector<LeafDivergenceCase> EstimateLeafDivergences(int draws,
                                                        uint64_t seed) {
  std::vector<LeafDivergenceCase> cases = {{1.0, 0.5, 2.0},
                                           {0.5, 0.2, 2.0},
                                           {0.1, 0.9, 4.0},
                                           {1.0, 0.1, 4.0},
                                           {0.3, 0.5, 1.0}};
  for (size_t k = 0; k < cases.size(); ++k) {
    LeafDivergenceCase& c = cases[k];
    Hyperparameters h;
    h.g_star = 1.0;
    h.r1 = c.r1;
    h.r2 = 1.0 - c.r1;
    const LeafNoiseScale scale = LeafNoiseFor(h, c.sigma2);
    const double a2 = scale.support_stddev * scale.support_stddev;
    const double b2 = scale.sum_stddev * scale.sum_stddev;
    // Neighbors differ by one point of gradient g: the pre-division pair
    // shifts by (1, g). Under X ~ P, log P/Q = (1 - 2 z1) / 2a2 +
    // (g^2 - 2 g z2) / 2b2; both directions share this law by symmetry of
    // the noise, so E_P[P/Q] estimates exp(D_2).
    Rng rng = MakeRng(DeriveSeed(seed, {k}));
    double mean = 0.0, m2 = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double z1 = SampleGaussian(rng, scale.support_stddev);
      const double z2 = SampleGaussian(rng, scale.sum_stddev);
      const double ratio = std::exp((1.0 - 2.0 * z1) / (2.0 * a2) +
                                    (c.g * c.g - 2.0 * c.g * z2) / (2.0 * b2));
      const double d = ratio - mean;
      mean += d / (i + 1);
      m2 += d * (ratio - mean);
    }
    const double se_mean = std::sqrt(m2 / (draws - 1) / draws);
    c.estimate = std::log(mean);
    c.standard_error = se_mean / mean;
    const double s[2] = {1.0, c.g};
    const double r[2] = {h.r1, h.r2};
    c.bound = *RdpGaussNonspherical(2, s, r, c.sigma2);
  }
  return cases;
}

CheckResult CheckLeafDivergence(int draws) {
  CheckResult result;
  result.passed = true;
  for (const LeafDivergenceCase& c : EstimateLeafDivergences(draws, 2024)) {
    const bool ok = c.estimate <= c.bound + 3.0 * c.standard_error;
    result.passed = result.passed && ok;
    result.detail += absl::StrFormat(
        "[g=%.2f r1=%.2f s2=%.1f: %.4f<=%.4f+3*%.4f] ", c.g, c.r1, c.sigma2,
        c.estimate, c.bound, c.standard_error);
  }
  return result;
}

namespace {

constexpr double kGridlessEps = 2.0;
constexpr int kFineGrid = 10'000;

struct GridlessFixture {
  Dataset data;
  std::vector<double> gradients;
  std::vector<size_t> rows;
};

GridlessFixture TwentyPoints() {
  auto schema = std::make_shared<Schema>();
  schema->label = "y";
  schema->features.push_back(*FeatureSpec::Numerical("x", 0.0, 1.0));
  GridlessFixture f{Dataset(schema), {}, {}};
  Rng rng = MakeRng(77);
  for (int i = 0; i < 20; ++i) {
    const double x = (i + SampleUniform(rng, 0.05, 0.95)) / 20.0;
    const double g = (x < 0.55 ? -0.8 : 0.7) + SampleUniform(rng, -0.2, 0.2);
    (void)f.data.AddRow(std::span<const double>(&x, 1), 0.0);
    f.gradients.push_back(g);
    f.rows.push_back(i);
  }
  return f;
}

// Brute-force gain of the split x <= c.
double GainAt(const GridlessFixture& f, double c, double lambda) {
  double sl = 0, nl = 0, sr = 0, nr = 0;
  for (size_t i : f.rows) {
    if (f.data.at(i, 0) <= c) {
      sl += f.gradients[i];
      nl += 1;
    } else {
      sr += f.gradients[i];
      nr += 1;
    }
  }
  return MseGainFromSums(sl, nl, sr, nr, lambda);
}

size_t BucketOf(const BucketSet& set, double v) {
  for (size_t b = 0; b < set.buckets.size(); ++b) {
    if (v >= set.buckets[b].lo && v < set.buckets[b].hi) return b;
  }
  return set.buckets.size() - 1;
}

// Fine-grid mechanism probabilities over grid midpoints.
std::vector<double> FineGridProbabilities(const GridlessFixture& f,
                                          double delta_u) {
  std::vector<double> logits(kFineGrid);
  for (int j = 0; j < kFineGrid; ++j) {
    logits[j] = kGridlessEps * GainAt(f, (j + 0.5) / kFineGrid, 1.0) /
                (2.0 * delta_u);
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(kFineGrid);
  double z = 0.0;
  for (int j = 0; j < kFineGrid; ++j) z += p[j] = std::exp(logits[j] - top);
  for (double& v : p) v /= z;
  return p;
}

}  // namespace

double GridlessTotalVariation(int samples, uint64_t seed) {
  const GridlessFixture f = TwentyPoints();
  const BucketSet set = BuildBuckets(f.data, f.rows, 1.0);
  const UtilityFn u = MakeMseGainUtility(f.data, f.rows, f.gradients, 1.0, 1.0);
  const std::vector<double> utilities = u.score(set);
  const std::vector<double> fine = FineGridProbabilities(f, u.sensitivity);
  std::vector<double> cdf(fine.size());
  std::partial_sum(fine.begin(), fine.end(), cdf.begin());

  std::vector<double> hist_gridless(set.buckets.size()), hist_grid(set.buckets.size());
  Rng rng = MakeRng(seed);
  for (int i = 0; i < samples; ++i) {
    SplitChoice c = *SampleBucket(set, utilities, u.sensitivity, kGridlessEps, rng);
    hist_gridless[BucketOf(set, c.value)] += 1.0 / samples;
    const double v = SampleUniform(rng, 0.0, cdf.back());
    const size_t j = std::min<size_t>(
        std::upper_bound(cdf.begin(), cdf.end(), v) - cdf.begin(), kFineGrid - 1);
    hist_grid[BucketOf(set, (j + 0.5) / kFineGrid)] += 1.0 / samples;
  }
  double tv = 0.0;
  for (size_t b = 0; b < set.buckets.size(); ++b) {
    tv += 0.5 * std::fabs(hist_gridless[b] - hist_grid[b]);
  }
  return tv;
}

double GridlessExactTotalVariation() {
  const GridlessFixture f = TwentyPoints();
  const BucketSet set = BuildBuckets(f.data, f.rows, 1.0);
  const UtilityFn u = MakeMseGainUtility(f.data, f.rows, f.gradients, 1.0, 1.0);
  const std::vector<double> p =
      *BucketProbabilities(set, u.score(set), u.sensitivity, kGridlessEps);
  const std::vector<double> fine = FineGridProbabilities(f, u.sensitivity);
  std::vector<double> q(set.buckets.size());
  for (int j = 0; j < kFineGrid; ++j) q[BucketOf(set, (j + 0.5) / kFineGrid)] += fine[j];
  double tv = 0.0;
  for (size_t b = 0; b < p.size(); ++b) tv += 0.5 * std::fabs(p[b] - q[b]);
  return tv;
}

namespace {

constexpr double kRatioEps = 1.0;

struct NeighborPair {
  GridlessFixture d, d_prime;
  std::vector<double> cuts;  // union of both bucket boundaries
};

NeighborPair FivePointPair() {
  auto schema = std::make_shared<Schema>();
  schema->label = "y";
  schema->features.push_back(*FeatureSpec::Numerical("x", 0.0, 1.0));
  const double xs[5] = {0.1, 0.3, 0.45, 0.7, 0.9};
  const double gs[5] = {-1.0, -0.9, 0.2, 1.0, 0.8};
  NeighborPair pair{{Dataset(schema), {}, {}}, {Dataset(schema), {}, {}}, {}};
  for (int i = 0; i < 5; ++i) {
    (void)pair.d.data.AddRow(std::span<const double>(&xs[i], 1), 0.0);
    pair.d.gradients.push_back(gs[i]);
    pair.d.rows.push_back(i);
    if (i == 2) continue;  // the neighbor lacks the third point
    (void)pair.d_prime.data.AddRow(std::span<const double>(&xs[i], 1), 0.0);
    pair.d_prime.gradients.push_back(gs[i]);
    pair.d_prime.rows.push_back(pair.d_prime.rows.size());
  }
  pair.cuts = {0.0, 1.0};
  for (double x : xs) pair.cuts.push_back(x);
  std::sort(pair.cuts.begin(), pair.cuts.end());
  return pair;
}

struct Mechanism {
  BucketSet set;
  std::vector<double> utilities;
  double delta_u;
  std::vector<double> p;
};

Mechanism MakeMechanism(const GridlessFixture& f) {
  Mechanism m;
  m.set = BuildBuckets(f.data, f.rows, 1.0);
  const UtilityFn u = MakeMseGainUtility(f.data, f.rows, f.gradients, 1.0, 1.0);
  m.utilities = u.score(m.set);
  m.delta_u = u.sensitivity;
  m.p = *BucketProbabilities(m.set, m.utilities, m.delta_u, kRatioEps);
  return m;
}

double Density(const Mechanism& m, double v) {
  const size_t b = BucketOf(m.set, v);
  return m.p[b] / m.set.buckets[b].width();
}

}  // namespace

double GridlessExactRatio() {
  const NeighborPair pair = FivePointPair();
  const Mechanism a = MakeMechanism(pair.d), b = MakeMechanism(pair.d_prime);
  double worst = 0.0;
  for (size_t k = 0; k + 1 < pair.cuts.size(); ++k) {
    const double mid = 0.5 * (pair.cuts[k] + pair.cuts[k + 1]);
    const double da = Density(a, mid), db = Density(b, mid);
    worst = std::max({worst, da / db, db / da});
  }
  return worst / std::exp(kRatioEps);
}

double GridlessEmpiricalRatioExcess(int samples, uint64_t seed) {
  const NeighborPair pair = FivePointPair();
  const Mechanism mechs[2] = {MakeMechanism(pair.d), MakeMechanism(pair.d_prime)};
  const size_t cells = pair.cuts.size() - 1;
  std::vector<double> counts[2] = {std::vector<double>(cells),
                                   std::vector<double>(cells)};
  for (int which = 0; which < 2; ++which) {
    Rng rng = MakeRng(DeriveSeed(seed, {uint64_t(which)}));
    for (int i = 0; i < samples; ++i) {
      const SplitChoice c = *SampleBucket(mechs[which].set, mechs[which].utilities,
                                          mechs[which].delta_u, kRatioEps, rng);
      const size_t k = std::upper_bound(pair.cuts.begin(), pair.cuts.end(),
                                        c.value) - pair.cuts.begin() - 1;
      counts[which][std::min(k, cells - 1)] += 1.0;
    }
  }
  double worst = -1e300;
  for (size_t k = 0; k < cells; ++k) {
    const double ca = counts[0][k], cb = counts[1][k];
    if (ca < 100 || cb < 100) continue;  // too rare to estimate a ratio
    for (const auto& [num, den] : {std::pair{ca, cb}, std::pair{cb, ca}}) {
      const double ratio = num / den;
      const double se = ratio * std::sqrt(1.0 / num + 1.0 / den);
      worst = std::max(worst, ratio - std::exp(kRatioEps) - 3.0 * se);
    }
  }
  return worst;
}

CheckResult CheckGridless() {
  const double tv = GridlessTotalVariation(100'000, 99);
  const double exact_ratio = GridlessExactRatio();
  const double excess = GridlessEmpiricalRatioExcess(1'000'000, 5);
  CheckResult result;
  result.passed = tv <= 0.01 && exact_ratio <= 1.0 + 1e-12 && excess <= 0.0;
  result.detail = absl::StrFormat(
      "tv=%.4f (<=0.01, 1e5 samples each) exact_ratio/e^eps=%.4f (<=1) "
      "empirical_ratio-e^eps-3se=%.4f (<=0)",
      tv, exact_ratio, excess);
  return result;
}

std::shared_ptr<const Schema> SyntheticSchema(Task task) {
  auto schema = std::make_shared<Schema>();
  schema->task = task;
  schema->label = "y";
  schema->features.push_back(*FeatureSpec::Numerical("x0", 0.0, 1.0));
  schema->features.push_back(*FeatureSpec::Categorical("x1", {"a", "b", "c"}));
  schema->features.push_back(*FeatureSpec::Numerical("x2", -1.0, 1.0));
  return schema;
}

Dataset SyntheticData(size_t n, Task task, uint64_t seed) {
  Dataset data(SyntheticSchema(task));
  Rng rng = MakeRng(seed);
  for (size_t i = 0; i < n; ++i) {
    const double x[3] = {SampleUniform(rng, 0.0, 1.0),
                         std::floor(SampleUniform(rng, 0.0, 3.0)),
                         SampleUniform(rng, -1.0, 1.0)};
    const double signal = 2.0 * x[0] + (x[1] == 1.0 ? 1.0 : 0.0);
    double y = signal + SampleGaussian(rng, 0.3);
    if (task == Task::kClassification) y = y > 1.3 ? 1.0 : 0.0;
    (void)data.AddRow(x, y);
  }
  return data;
}

CheckResult CheckStructureSeparation(int trials) {
  int identical = 0;
  std::string first_failure;
  for (int t = 0; t < trials; ++t) {
    const Task task = t % 2 == 0 ? Task::kRegression : Task::kClassification;
    const Dataset data = SyntheticData(40, task, 1000 + t);
    // Neighbor: the dataset without one point.
    std::vector<size_t> keep;
    for (size_t i = 0; i < data.size(); ++i) {
      if (i != static_cast<size_t>(t) % data.size()) keep.push_back(i);
    }
    const Dataset neighbor = data.Subset(keep);
    Hyperparameters h;
    h.depth = 3;
    h.t_regular = 5;
    h.t_extra = t % 3 == 0 ? 2 : 0;
    h.gamma = 0.5;
    h.eps_trees = 1.0;
    h.eps_init = 0.1;
    h.leaf_noise = t % 4 == 1 ? LeafNoise::kStatic : LeafNoise::kDynamic;
    const uint64_t seed = DeriveSeed(31, {uint64_t(t)});
    absl::StatusOr<TrainResult> a = TrainSgbdt(data, h, seed);
    absl::StatusOr<TrainResult> b = TrainSgbdt(neighbor, h, seed);
    bool same = a.ok() && b.ok() &&
                a->ensemble.trees.size() == b->ensemble.trees.size() &&
                a->ensemble.trees.size() == size_t(h.total_rounds());
    for (size_t k = 0; same && k < a->ensemble.trees.size(); ++k) {
      same = a->ensemble.trees[k].SameStructure(b->ensemble.trees[k]);
    }
    if (same) {
      ++identical;
    } else if (first_failure.empty()) {
      first_failure = absl::StrFormat(" first failure: trial %d", t);
    }
  }
  CheckResult result;
  result.passed = identical == trials;
  result.detail =
      absl::StrFormat("%d/%d trials identical%s", identical, trials, first_failure);
  return result;
}

namespace {

bool BitEqual(double a, double b) {
  return std::bit_cast<uint64_t>(a) == std::bit_cast<uint64_t>(b);
}

Hyperparameters DistributedParams() {
  Hyperparameters h;
  h.depth = 3;
  h.t_regular = 10;
  h.gamma = 0.5;
  h.eps_trees = 2.0;
  h.eps_init = 0.0;
  h.use_init_score = false;
  h.lambda = 5.0;
  h.eta = 0.3;
  return h;
}

}  // namespace

CheckResult CheckDistributed() {
  CheckResult result;
  const Dataset data = SyntheticData(300, Task::kRegression, 5);
  const Hyperparameters h = DistributedParams();
  const uint64_t seed = 123;
  const FixedPoint fp;

  // k = 1 against the single-process trainer.
  absl::StatusOr<TrainResult> single = TrainSgbdt(data, h, seed);
  absl::StatusOr<DistributedResult> one = DistributedTrain({data}, h, seed);
  if (!single.ok() || !one.ok()) {
    result.detail = "training failed";
    return result;
  }
  double k1_diff = 0.0;
  bool k1_shape = single->ensemble.trees.size() == one->ensemble.trees.size();
  for (size_t t = 0; k1_shape && t < single->ensemble.trees.size(); ++t) {
    const Tree& a = single->ensemble.trees[t];
    const Tree& b = one->ensemble.trees[t];
    k1_shape = a.SameStructure(b);
    for (size_t l = 0; l < a.num_leaves(); ++l) {
      k1_diff = std::max(k1_diff, std::fabs(a.leaves()[l] - b.leaves()[l]));
    }
  }
  // One quantization step per round, propagated through later gradients.
  const double k1_tolerance = h.total_rounds() * fp.step();
  const bool k1_ok = k1_shape && k1_diff <= k1_tolerance;

  // k = 3 replicas.
  absl::StatusOr<DistributedResult> three =
      DistributedTrain(PartitionUniform(data, 3, seed), h, seed);
  bool replicas_ok = three.ok() &&
                     three->rounds_replicas_identical == h.total_rounds();
  for (int u = 1; replicas_ok && u < 3; ++u) {
    const Ensemble& a = three->replicas[0];
    const Ensemble& b = three->replicas[u];
    replicas_ok = a.trees.size() == b.trees.size() &&
                  BitEqual(a.init_score, b.init_score);
    for (size_t t = 0; replicas_ok && t < a.trees.size(); ++t) {
      replicas_ok = a.trees[t].SameStructure(b.trees[t]);
      for (size_t l = 0; replicas_ok && l < a.trees[t].num_leaves(); ++l) {
        replicas_ok = BitEqual(a.trees[t].leaves()[l], b.trees[t].leaves()[l]);
      }
    }
  }

  // k = 2 against the two-term average of the local leaf vectors.
  DistributedOptions options;
  options.keep_local_contributions = true;
  absl::StatusOr<DistributedResult> two =
      DistributedTrain(PartitionUniform(data, 2, seed), h, seed, options);
  double k2_diff = two.ok() ? 0.0 : INFINITY;
  for (int t = 0; two.ok() && t < h.total_rounds(); ++t) {
    const std::vector<double>& w1 = two->local_contributions[t][0];
    const std::vector<double>& w2 = two->local_contributions[t][1];
    const std::vector<double>& got = two->ensemble.trees[t].leaves();
    for (size_t l = 0; l < got.size(); ++l) {
      k2_diff = std::max(k2_diff, std::fabs(got[l] - 0.5 * (w1[l] + w2[l])));
    }
  }
  const bool k2_ok = k2_diff <= fp.step();

  result.passed = k1_ok && replicas_ok && k2_ok;
  result.detail = absl::StrFormat(
      "k1_max_leaf_diff=%.3g (<=%.3g) replicas_identical=%s "
      "k2_max_avg_diff=%.3g (<=%.3g)",
      k1_diff, k1_tolerance, replicas_ok ? "yes" : "no", k2_diff, fp.step());
  return result;
}

}  // namespace sgbdt::testing
