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

#ifndef SGBDT_GRIDLESS_EXP_MECH_H_
#define SGBDT_GRIDLESS_EXP_MECH_H_

#include <functional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "sgbdt/dataset.h"
#include "sgbdt/random.h"

namespace sgbdt {

// Split candidates [lo, hi) of one feature that induce the same partition of
// the data. Numerical buckets send {x <= lo} left; categorical buckets have
// unit width and send {x == lo} left.
struct Bucket {
  int feature = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool categorical = false;
  double weight = 1.0;  // r / (v_max - v_min) numerical, 1 categorical

  double width() const { return categorical ? 1.0 : hi - lo; }
};

struct BucketSet {
  std::vector<Bucket> buckets;
};

// Numerical features: the distinct sorted values u_1 < ... < u_k of `rows`
// cut the border into [v_min, u_1), [u_1, u_2), ..., [u_k, v_max]; buckets
// of zero width are dropped (they carry no probability). Categorical
// features: one bucket per declared value.
BucketSet BuildBuckets(const Dataset& data, std::span<const size_t> rows,
                       double r);
BucketSet BuildBuckets(const Dataset& data, double r);

// Scores every bucket of a set; must be constant over each bucket.
struct UtilityFn {
  std::function<std::vector<double>(const BucketSet&)> score;
  double sensitivity = 1.0;
};

// Gain of the split at each bucket's representative, with gradients clipped
// to g*; sensitivity 3 g*^2.
UtilityFn MakeMseGainUtility(const Dataset& data, std::span<const size_t> rows,
                             std::span<const double> gradients, double lambda,
                             double g_star);

// Normalised probabilities w |B| exp(eps u / (2 delta_u)) / Q, computed in
// log space. eps = +inf keeps only the maximal-utility buckets.
absl::StatusOr<std::vector<double>> BucketProbabilities(
    const BucketSet& set, std::span<const double> utilities, double delta_u,
    double eps);

struct SplitChoice {
  int feature = 0;
  double value = 0.0;
  bool categorical = false;
  size_t bucket = 0;
};

// Draws a bucket, then a value uniformly inside it (numerical) or the
// bucket's category.
absl::StatusOr<SplitChoice> GridlessExpMech(const BucketSet& set,
                                            const UtilityFn& utility,
                                            double eps, Rng& rng);

// Same, with precomputed utilities.
absl::StatusOr<SplitChoice> SampleBucket(const BucketSet& set,
                                         std::span<const double> utilities,
                                         double delta_u, double eps, Rng& rng);

}  // namespace sgbdt

#endif  // SGBDT_GRIDLESS_EXP_MECH_H_
