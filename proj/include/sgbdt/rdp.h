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

#ifndef SGBDT_RDP_H_
#define SGBDT_RDP_H_

#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "sgbdt/hyperparameters.h"

namespace sgbdt {

// rho(alpha) for integer orders 2..max_order().
class RdpCurve {
 public:
  RdpCurve() = default;
  // values[k] is rho(k + 2). All entries must be >= 0.
  static absl::StatusOr<RdpCurve> FromValues(std::vector<double> values);
  // rho(alpha) = slope * alpha, the shape of every Gaussian curve.
  static RdpCurve Linear(double slope, int max_order);

  int max_order() const { return static_cast<int>(values_.size()) + 1; }
  absl::StatusOr<double> at(int alpha) const;

 private:
  std::vector<double> values_;
};

// Gaussian mechanism with covariance D^-1 diag(sigma2 / r_d):
// rho = alpha * D * sum_d r_d s_d^2 / (2 sigma2).
absl::StatusOr<double> RdpGaussNonspherical(int alpha,
                                            std::span<const double> s,
                                            std::span<const double> r,
                                            double sigma2);

// Laplace mechanism with sensitivity/scale ratio t.
double RdpLaplace(int alpha, double t);

// Bound for the private initial score. The ratio depends on which scale the
// mechanism samples; see InitNoise.
absl::StatusOr<double> RdpLaplaceInitScore(int alpha, double m_star, size_t n,
                                           double eps_init, InitNoise mode);

// Pure-DP epsilon of the initial score as actually sampled.
double InitScoreEpsilon(double eps_init, InitNoise mode);

// Amplification by Poisson subsampling with ratio gamma for integer alpha.
// Requires curve.max_order() >= alpha.
absl::StatusOr<double> RdpSubsampled(
    int alpha, const RdpCurve& curve, double gamma,
    SubsamplingBound bound = SubsamplingBound::kGeneral);

// Same bound for the linear curve rho'(l) = slope * l, without allocation.
double RdpSubsampledLinear(
    int alpha, double slope, double gamma,
    SubsamplingBound bound = SubsamplingBound::kGeneral);

// Sequential composition at a common order.
double RdpCompose(std::span<const double> parts);

// Solves exp(rho - alpha eps) = delta.
absl::StatusOr<double> RdpToAdp(int alpha, double rho, double delta);
// eps = rho + log(1/delta) / (alpha - 1).
absl::StatusOr<double> RdpToAdpStandard(int alpha, double rho, double delta);
// eps = rho + log((alpha-1)/alpha) - (log delta + log alpha) / (alpha - 1),
// clamped at 0.
absl::StatusOr<double> RdpToAdpBalle(int alpha, double rho, double delta);

absl::StatusOr<double> ConvertRdpToAdp(AdpConversion conversion, int alpha,
                                       double rho, double delta);

}  // namespace sgbdt

#endif  // SGBDT_RDP_H_
