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

#include "sgbdt/gridless_exp_mech.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "sgbdt/nonprivate.h"
#include "sgbdt/sgbdt.h"

namespace sgbdt {

BucketSet BuildBuckets(const Dataset& data, std::span<const size_t> rows,
                       double r) {
  BucketSet set;
  const Schema& schema = data.schema();
  std::vector<double> values;
  for (int f = 0; f < schema.num_features(); ++f) {
    const FeatureSpec& spec = schema.features[f];
    if (spec.is_categorical()) {
      for (int c = 0; c < spec.num_values(); ++c) {
        set.buckets.push_back({f, double(c), c + 1.0, true, 1.0});
      }
      continue;
    }
    const double weight = r / (spec.max() - spec.min());
    values.clear();
    for (size_t i : rows) values.push_back(data.at(i, f));
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    double lo = spec.min();
    for (double v : values) {
      if (v > lo) set.buckets.push_back({f, lo, v, false, weight});
      lo = v;
    }
    if (spec.max() > lo) set.buckets.push_back({f, lo, spec.max(), false, weight});
  }
  return set;
}

BucketSet BuildBuckets(const Dataset& data, double r) {
  std::vector<size_t> rows(data.size());
  std::iota(rows.begin(), rows.end(), size_t{0});
  return BuildBuckets(data, rows, r);
}

UtilityFn MakeMseGainUtility(const Dataset& data, std::span<const size_t> rows,
                             std::span<const double> gradients, double lambda,
                             double g_star) {
  UtilityFn fn;
  fn.sensitivity = 3.0 * g_star * g_star;
  std::vector<size_t> members(rows.begin(), rows.end());
  fn.score = [&data, members, gradients, lambda,
              g_star](const BucketSet& set) {
    std::vector<double> out(set.buckets.size());
    double total = 0.0;
    for (size_t i : members) total += Clip(gradients[i], g_star);
    const double n = static_cast<double>(members.size());
    // Feature -> (value, clipped gradient) sorted by value, for prefix sums.
    int cached_feature = -1;
    std::vector<std::pair<double, double>> sorted;
    std::vector<double> category_sum, category_count;
    size_t cursor = 0;
    double left_sum = 0.0, left_count = 0.0;
    for (size_t b = 0; b < set.buckets.size(); ++b) {
      const Bucket& bucket = set.buckets[b];
      if (bucket.feature != cached_feature) {
        cached_feature = bucket.feature;
        sorted.clear();
        for (size_t i : members) {
          sorted.push_back({data.at(i, bucket.feature),
                            Clip(gradients[i], g_star)});
        }
        std::sort(sorted.begin(), sorted.end());
        cursor = 0;
        left_sum = left_count = 0.0;
        if (bucket.categorical) {
          const int k = data.schema().features[bucket.feature].num_values();
          category_sum.assign(k, 0.0);
          category_count.assign(k, 0.0);
          for (const auto& [v, g] : sorted) {
            category_sum[static_cast<int>(v)] += g;
            category_count[static_cast<int>(v)] += 1.0;
          }
        }
      }
      if (bucket.categorical) {
        const int c = static_cast<int>(bucket.lo);
        out[b] = MseGainFromSums(category_sum[c], category_count[c],
                                 total - category_sum[c],
                                 n - category_count[c], lambda);
        continue;
      }
      // Buckets of a feature arrive in increasing order of lo.
      while (cursor < sorted.size() && sorted[cursor].first <= bucket.lo) {
        left_sum += sorted[cursor].second;
        left_count += 1.0;
        ++cursor;
      }
      out[b] = MseGainFromSums(left_sum, left_count, total - left_sum,
                               n - left_count, lambda);
    }
    return out;
  };
  return fn;
}

absl::StatusOr<std::vector<double>> BucketProbabilities(
    const BucketSet& set, std::span<const double> utilities, double delta_u,
    double eps) {
  const size_t k = set.buckets.size();
  if (k == 0) return absl::InvalidArgumentError("no buckets");
  if (utilities.size() != k) {
    return absl::InvalidArgumentError("one utility per bucket required");
  }
  if (!(delta_u > 0) || !(eps >= 0)) {
    return absl::InvalidArgumentError("need delta_u > 0 and eps >= 0");
  }
  std::vector<double> log_p(k);
  const bool greedy = std::isinf(eps);
  const double best = *std::max_element(utilities.begin(), utilities.end());
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < k; ++b) {
    if (!std::isfinite(utilities[b])) {
      return absl::InvalidArgumentError(absl::StrCat("non-finite utility at ", b));
    }
    const double base = std::log(set.buckets[b].weight * set.buckets[b].width());
    if (greedy) {
      log_p[b] = utilities[b] == best ? base : kNegInf;
    } else {
      log_p[b] = base + eps * (utilities[b] - best) / (2.0 * delta_u);
    }
  }
  const double top = *std::max_element(log_p.begin(), log_p.end());
  if (top == kNegInf) return absl::InternalError("all buckets have zero mass");
  double z = 0.0;
  for (double lp : log_p) z += std::exp(lp - top);
  std::vector<double> p(k);
  for (size_t b = 0; b < k; ++b) p[b] = std::exp(log_p[b] - top) / z;
  return p;
}

absl::StatusOr<SplitChoice> SampleBucket(const BucketSet& set,
                                         std::span<const double> utilities,
                                         double delta_u, double eps, Rng& rng) {
  absl::StatusOr<std::vector<double>> p =
      BucketProbabilities(set, utilities, delta_u, eps);
  if (!p.ok()) return p.status();
  double u = SampleUniform(rng, 0.0, 1.0);
  size_t chosen = p->size() - 1;
  for (size_t b = 0; b < p->size(); ++b) {
    if (u < (*p)[b]) {
      chosen = b;
      break;
    }
    u -= (*p)[b];
  }
  // Rounding may leave u past the end; never land on a zero-mass bucket.
  while ((*p)[chosen] == 0.0 && chosen > 0) --chosen;
  const Bucket& bucket = set.buckets[chosen];
  SplitChoice choice;
  choice.feature = bucket.feature;
  choice.categorical = bucket.categorical;
  choice.bucket = chosen;
  choice.value = bucket.categorical ? bucket.lo
                                    : SampleUniform(rng, bucket.lo, bucket.hi);
  return choice;
}

absl::StatusOr<SplitChoice> GridlessExpMech(const BucketSet& set,
                                            const UtilityFn& utility,
                                            double eps, Rng& rng) {
  const std::vector<double> utilities = utility.score(set);
  return SampleBucket(set, utilities, utility.sensitivity, eps, rng);
}

}  // namespace sgbdt
