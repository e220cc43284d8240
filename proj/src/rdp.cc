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

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace sgbdt {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double LogBinomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log(c * e^x - 1) for c >= 1, x >= 0; -inf when the value is 0.
double LogScaledExpm1(double c, double x) {
  if (c == 1.0) {
    if (x == 0.0) return kNegInf;
    // log(e^x - 1) = x + log(1 - e^-x).
    return x > 1.0 ? x + std::log1p(-std::exp(-x)) : std::log(std::expm1(x));
  }
  return x + std::log(c - std::exp(-x));
}

double LogAddExp(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// The bound writes the l = 0, 1 binomial terms as (1-g)^(a-1)(a g - g + 1).
// Subtracting the full binomial expansion (which sums to 1) leaves only
// positive l >= 2 terms C(a,l)(1-g)^(a-l) g^l (c_l e^((l-1) rho'(l)) - 1),
// with c_2 = 1 and c_l = c (3 in general, 1 for Gaussian mechanisms), so the
// result is log1p of their sum.
// This keeps full relative precision when the bound is tiny.
template <typename CurveFn>
double SubsampledBound(int alpha, double gamma, SubsamplingBound bound,
                       CurveFn rho_prime) {
  const double c_high = bound == SubsamplingBound::kGeneral ? 3.0 : 1.0;
  if (gamma == 0.0) return 0.0;
  const double log_gamma = std::log(gamma);
  const double log_one_minus = std::log1p(-gamma);
  double log_excess = kNegInf;
  for (int l = 2; l <= alpha; ++l) {
    const double c = l == 2 ? 1.0 : c_high;
    const double exponent = (l - 1) * rho_prime(l);
    const double term = LogBinomial(alpha, l) + l * log_gamma +
                        (alpha - l == 0 ? 0.0 : (alpha - l) * log_one_minus) +
                        LogScaledExpm1(c, exponent);
    log_excess = LogAddExp(log_excess, term);
  }
  if (log_excess == kNegInf) return 0.0;
  const double log_total = log_excess > 0
                               ? log_excess + std::log1p(std::exp(-log_excess))
                               : std::log1p(std::exp(log_excess));
  return log_total / (alpha - 1);
}

absl::Status CheckDelta(int alpha, double rho, double delta) {
  if (alpha < 2) return absl::InvalidArgumentError("order must be >= 2");
  if (!(rho >= 0)) return absl::InvalidArgumentError("rho must be >= 0");
  if (!(delta > 0 && delta < 1)) {
    return absl::InvalidArgumentError("delta must be in (0, 1)");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<RdpCurve> RdpCurve::FromValues(std::vector<double> values) {
  for (double v : values) {
    if (!(v >= 0)) return absl::InvalidArgumentError("negative RDP value");
  }
  RdpCurve curve;
  curve.values_ = std::move(values);
  return curve;
}

RdpCurve RdpCurve::Linear(double slope, int max_order) {
  RdpCurve curve;
  for (int a = 2; a <= max_order; ++a) curve.values_.push_back(slope * a);
  return curve;
}

absl::StatusOr<double> RdpCurve::at(int alpha) const {
  if (alpha < 2 || alpha > max_order()) {
    return absl::OutOfRangeError(
        absl::StrCat("RDP curve has no value at order ", alpha));
  }
  return values_[alpha - 2];
}

absl::StatusOr<double> RdpGaussNonspherical(int alpha,
                                            std::span<const double> s,
                                            std::span<const double> r,
                                            double sigma2) {
  if (alpha < 2) return absl::InvalidArgumentError("order must be >= 2");
  if (!(sigma2 > 0)) return absl::InvalidArgumentError("sigma2 must be > 0");
  if (s.size() != r.size() || s.empty()) {
    return absl::InvalidArgumentError("need one weight per sensitivity");
  }
  double weight_sum = 0.0, weighted = 0.0;
  for (size_t d = 0; d < r.size(); ++d) {
    if (!(r[d] > 0)) return absl::InvalidArgumentError("weights must be > 0");
    weight_sum += r[d];
    weighted += r[d] * s[d] * s[d];
  }
  if (std::fabs(weight_sum - 1.0) > 1e-12) {
    return absl::InvalidArgumentError("weights must sum to 1");
  }
  return alpha * static_cast<double>(s.size()) * weighted / (2.0 * sigma2);
}

double RdpLaplace(int alpha, double t) {
  const double a = alpha;
  const double lhs = std::log(a / (2 * a - 1)) + (a - 1) * t;
  const double rhs = std::log((a - 1) / (2 * a - 1)) - a * t;
  return std::max(0.0, LogAddExp(lhs, rhs) / (a - 1));
}

double InitScoreEpsilon(double eps_init, InitNoise mode) {
  return mode == InitNoise::kWideScale ? eps_init : 2.0 * eps_init;
}

absl::StatusOr<double> RdpLaplaceInitScore(int alpha, double m_star, size_t n,
                                           double eps_init, InitNoise mode) {
  if (n == 0) return absl::InvalidArgumentError("empty dataset");
  if (alpha < 2) return absl::InvalidArgumentError("order must be >= 2");
  if (!(m_star > 0) || !(eps_init > 0)) {
    return absl::InvalidArgumentError("m_star and eps_init must be > 0");
  }
  // Sensitivity 2 m* / n over scale c m* / (n eps): m* and n cancel.
  return RdpLaplace(alpha, InitScoreEpsilon(eps_init, mode));
}

absl::StatusOr<double> RdpSubsampled(int alpha, const RdpCurve& curve,
                                     double gamma, SubsamplingBound bound) {
  if (alpha < 2) return absl::InvalidArgumentError("order must be >= 2");
  if (!(gamma >= 0 && gamma <= 1)) {
    return absl::InvalidArgumentError("gamma must be in [0, 1]");
  }
  if (curve.max_order() < alpha) {
    return absl::InvalidArgumentError(absl::StrCat(
        "curve defined up to order ", curve.max_order(), ", need ", alpha));
  }
  return SubsampledBound(alpha, gamma, bound,
                         [&](int l) { return *curve.at(l); });
}

double RdpSubsampledLinear(int alpha, double slope, double gamma,
                           SubsamplingBound bound) {
  return SubsampledBound(alpha, gamma, bound,
                         [slope](int l) { return slope * l; });
}

double RdpCompose(std::span<const double> parts) {
  double total = 0.0;
  for (double p : parts) total += p;
  return total;
}

absl::StatusOr<double> RdpToAdp(int alpha, double rho, double delta) {
  if (absl::Status s = CheckDelta(alpha, rho, delta); !s.ok()) return s;
  return (rho - std::log(delta)) / alpha;
}

absl::StatusOr<double> RdpToAdpStandard(int alpha, double rho, double delta) {
  if (absl::Status s = CheckDelta(alpha, rho, delta); !s.ok()) return s;
  return rho - std::log(delta) / (alpha - 1);
}

absl::StatusOr<double> RdpToAdpBalle(int alpha, double rho, double delta) {
  if (absl::Status s = CheckDelta(alpha, rho, delta); !s.ok()) return s;
  const double a = alpha;
  return std::max(0.0, rho + std::log((a - 1) / a) -
                           (std::log(delta) + std::log(a)) / (a - 1));
}

absl::StatusOr<double> ConvertRdpToAdp(AdpConversion conversion, int alpha,
                                       double rho, double delta) {
  switch (conversion) {
    case AdpConversion::kSimple:
      return RdpToAdp(alpha, rho, delta);
    case AdpConversion::kStandard:
      return RdpToAdpStandard(alpha, rho, delta);
    case AdpConversion::kBalle:
      return RdpToAdpBalle(alpha, rho, delta);
  }
  return absl::InternalError("unknown conversion");
}

}  // namespace sgbdt
