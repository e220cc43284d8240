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

#include "sgbdt/rdp.h"

#include <cmath>
#include <vector>

#include "checks.h"
#include "gtest/gtest.h"

namespace sgbdt {
namespace {

using testing::RenyiGaussQuadrature;
using testing::RenyiLaplaceQuadrature;
using testing::SubsampledHighPrecision;

TEST(RdpGaussNonspherical, SingleDimensionIsStandardGaussian) {
  const double s[] = {1.0}, r[] = {1.0};
  EXPECT_DOUBLE_EQ(*RdpGaussNonspherical(2, s, r, 1.0), 1.0);
}

TEST(RdpGaussNonspherical, ZeroSensitivityIsZero) {
  const double s[] = {0.0, 0.0}, r[] = {0.3, 0.7};
  EXPECT_EQ(*RdpGaussNonspherical(5, s, r, 0.5), 0.0);
}

TEST(RdpGaussNonspherical, TwoDimensionsMatchesQuadrature) {
  const double s[] = {1.0, 0.2}, r[] = {0.5, 0.5};
  const double got = *RdpGaussNonspherical(2, s, r, 1.0);
  EXPECT_NEAR(got, 1.04, 1e-12);
  EXPECT_NEAR(got, RenyiGaussQuadrature(2, s, r, 1.0), 1e-6 * got);
}

TEST(RdpGaussNonspherical, RejectsBadInput) {
  const double s[] = {1.0, 1.0}, r[] = {0.5, 0.6}, one[] = {1.0};
  EXPECT_FALSE(RdpGaussNonspherical(1, one, one, 1.0).ok());
  EXPECT_FALSE(RdpGaussNonspherical(2, s, r, 1.0).ok());
  EXPECT_FALSE(RdpGaussNonspherical(2, one, one, 0.0).ok());
}

TEST(RdpGaussNonspherical, QuadratureGrid) {
  const testing::CheckResult r = testing::CheckAccountantOracles();
  EXPECT_TRUE(r.passed) << r.detail;
}

TEST(RdpLaplace, OrderTwoUnitShiftClosedForm) {
  const double want = std::log(2.0 / 3.0 * std::exp(1.0) +
                               1.0 / 3.0 * std::exp(-2.0));
  EXPECT_NEAR(RdpLaplace(2, 1.0), want, 1e-14);
  EXPECT_NEAR(RenyiLaplaceQuadrature(2, 1.0), want, 1e-9);
}

TEST(RdpLaplace, MatchesQuadrature) {
  for (int alpha : {2, 3, 5, 10}) {
    for (double t : {0.01, 0.3, 1.0, 2.5}) {
      const double want = RenyiLaplaceQuadrature(alpha, t);
      EXPECT_NEAR(RdpLaplace(alpha, t), want, 1e-7 * want)
          << "alpha=" << alpha << " t=" << t;
    }
  }
}

TEST(RdpLaplaceInitScore, VanishesWithBudget) {
  double previous = INFINITY;
  for (double eps : {1.0, 0.1, 1e-3, 1e-6}) {
    const double rho =
        *RdpLaplaceInitScore(4, 10.0, 100, eps, InitNoise::kWideScale);
    EXPECT_LT(rho, previous);
    previous = rho;
  }
  EXPECT_LT(previous, 1e-9);
}

TEST(RdpSubsampled, ZeroRatioIsZero) {
  for (int alpha : {2, 3, 10, 64}) {
    EXPECT_EQ(RdpSubsampledLinear(alpha, 0.7, 0.0), 0.0);
    EXPECT_EQ(*RdpSubsampled(alpha, RdpCurve::Linear(0.7, alpha), 0.0), 0.0);
  }
}

TEST(RdpSubsampled, FullRatioOrderTwoIsBaseCurve) {
  for (SubsamplingBound b :
       {SubsamplingBound::kGeneral, SubsamplingBound::kGaussian}) {
    EXPECT_NEAR(RdpSubsampledLinear(2, 0.35, 1.0, b), 0.7, 1e-14);
  }
}

TEST(RdpSubsampled, OrderFourExampleMatchesHighPrecision) {
  const std::vector<double> curve = {0.10, 0.15, 0.20};
  for (SubsamplingBound b :
       {SubsamplingBound::kGeneral, SubsamplingBound::kGaussian}) {
    const double want = SubsampledHighPrecision(4, curve, 0.1, b);
    EXPECT_NEAR(RdpSubsampledLinear(4, 0.05, 0.1, b), want, 1e-10 * want);
    absl::StatusOr<RdpCurve> c = RdpCurve::FromValues(curve);
    ASSERT_TRUE(c.ok());
    EXPECT_NEAR(*RdpSubsampled(4, *c, 0.1, b), want, 1e-10 * want);
  }
}

TEST(RdpSubsampled, GaussianBoundIsTighter) {
  for (int alpha : {3, 8, 32}) {
    EXPECT_LT(RdpSubsampledLinear(alpha, 0.1, 0.05, SubsamplingBound::kGaussian),
              RdpSubsampledLinear(alpha, 0.1, 0.05, SubsamplingBound::kGeneral));
  }
}

TEST(RdpSubsampled, MonotoneInRatio) {
  double previous = 0.0;
  for (double gamma : {0.001, 0.01, 0.1, 0.5, 1.0}) {
    const double rho = RdpSubsampledLinear(8, 0.2, gamma);
    EXPECT_GT(rho, previous);
    previous = rho;
  }
}

TEST(RdpSubsampled, CurveTooShortIsError) {
  EXPECT_FALSE(RdpSubsampled(5, RdpCurve::Linear(0.1, 4), 0.1).ok());
}

TEST(RdpCurve, RejectsNegativeValues) {
  EXPECT_FALSE(RdpCurve::FromValues({0.1, -0.2}).ok());
  EXPECT_FALSE(RdpCurve().at(2).ok());
}

TEST(RdpCompose, Sums) {
  EXPECT_EQ(RdpCompose(std::vector<double>{0, 0, 0}), 0.0);
  EXPECT_NEAR(RdpCompose(std::vector<double>{0.1, 0.2, 0.3}), 0.6, 1e-15);
  EXPECT_NEAR(RdpCompose(std::vector<double>(100, 0.013)), 1.3, 1e-12);
}

TEST(RdpToAdp, Examples) {
  EXPECT_NEAR(*RdpToAdp(2, 0.0, std::exp(-2.0)), 1.0, 1e-15);
  EXPECT_NEAR(*RdpToAdp(10, 1.0, 1e-5), (1.0 - std::log(1e-5)) / 10.0, 1e-15);
  EXPECT_NEAR(*RdpToAdp(10, 1.0, 1e-5), 1.2513, 1e-4);
}

TEST(RdpToAdp, BoundaryDeltaApproachesZeroEpsilon) {
  // delta = exp(rho) is only reachable as a limit; delta = 1 is rejected.
  EXPECT_NEAR(*RdpToAdp(3, 0.0, 1.0 - 1e-12), 0.0, 1e-12);
  EXPECT_FALSE(RdpToAdp(3, 0.0, 1.0).ok());
}

TEST(RdpToAdp, RoundTrip) {
  for (int alpha : {2, 7, 100}) {
    for (double rho : {0.0, 0.2, 3.0}) {
      const double eps = *RdpToAdp(alpha, rho, 1e-6);
      EXPECT_NEAR(std::exp(rho - alpha * eps) / 1e-6, 1.0, 1e-12);
    }
  }
}

TEST(RdpToAdp, ErrorsOnBadInput) {
  EXPECT_FALSE(RdpToAdp(1, 0.1, 1e-5).ok());
  EXPECT_FALSE(RdpToAdp(2, -0.1, 1e-5).ok());
  EXPECT_FALSE(RdpToAdp(2, 0.1, 0.0).ok());
  EXPECT_FALSE(RdpToAdpBalle(2, 0.1, 1.0).ok());
}

TEST(ConvertRdpToAdp, ConversionsAreOrdered) {
  // The improved conversion is never looser than the standard one.
  for (int alpha : {2, 8, 64}) {
    const double standard = *RdpToAdpStandard(alpha, 0.3, 1e-5);
    const double balle = *RdpToAdpBalle(alpha, 0.3, 1e-5);
    EXPECT_LE(balle, standard);
    EXPECT_EQ(*ConvertRdpToAdp(AdpConversion::kBalle, alpha, 0.3, 1e-5), balle);
  }
}

}  // namespace
}  // namespace sgbdt
