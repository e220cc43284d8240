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

#include "sgbdt/nonprivate.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "sgbdt/loss.h"
#include "sgbdt/sgbdt.h"

namespace sgbdt {
namespace {

// Per-feature split candidates: numerical thresholds (x <= t goes left) or
// categorical codes (x == c goes left), and each point's bin.
struct Binning {
  std::vector<std::vector<double>> thresholds;  // numerical only
  std::vector<std::vector<uint16_t>> bin;       // [feature][point]
  std::vector<int> num_bins;
};

Binning BuildBinning(const Dataset& data, int max_bins) {
  const int m = data.num_features();
  const size_t n = data.size();
  Binning b;
  b.thresholds.resize(m);
  b.bin.assign(m, std::vector<uint16_t>(n));
  b.num_bins.resize(m);
  for (int f = 0; f < m; ++f) {
    const FeatureSpec& spec = data.schema().features[f];
    if (spec.is_categorical()) {
      b.num_bins[f] = spec.num_values();
      for (size_t i = 0; i < n; ++i) b.bin[f][i] = static_cast<uint16_t>(data.at(i, f));
      continue;
    }
    std::vector<double> values(n);
    for (size_t i = 0; i < n; ++i) values[i] = data.at(i, f);
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    std::vector<double>& t = b.thresholds[f];
    if (static_cast<int>(values.size()) <= max_bins) {
      t.assign(values.begin(), values.end());
    } else {
      for (int k = 1; k <= max_bins; ++k) {
        t.push_back(values[(values.size() - 1) * k / max_bins]);
      }
      t.erase(std::unique(t.begin(), t.end()), t.end());
    }
    b.num_bins[f] = static_cast<int>(t.size());
    for (size_t i = 0; i < n; ++i) {
      // First threshold >= x: x <= t[k] for all k >= bin.
      b.bin[f][i] = static_cast<uint16_t>(
          std::lower_bound(t.begin(), t.end(), data.at(i, f)) - t.begin());
    }
  }
  return b;
}

Tree GrowTree(const Dataset& data, const Binning& bins,
              std::span<const double> g, const Hyperparameters& h) {
  const int m = data.num_features();
  Tree tree(h.depth);
  std::vector<std::vector<size_t>> members(1);
  members[0].resize(data.size());
  for (size_t i = 0; i < data.size(); ++i) members[0][i] = i;

  size_t node = 0;
  for (int level = 0; level < h.depth; ++level) {
    std::vector<std::vector<size_t>> next;
    for (std::vector<size_t>& idx : members) {
      double total = 0.0;
      for (size_t i : idx) total += g[i];
      double best_gain = -1.0;
      Split best{0, data.schema().features[0].is_numerical()
                        ? data.schema().features[0].max()
                        : 0.0,
                 data.schema().features[0].is_categorical()};
      for (int f = 0; f < m; ++f) {
        const int nb = bins.num_bins[f];
        std::vector<double> sum(nb + 1, 0.0), cnt(nb + 1, 0.0);
        for (size_t i : idx) {
          sum[bins.bin[f][i]] += g[i];
          cnt[bins.bin[f][i]] += 1.0;
        }
        const bool categorical = data.schema().features[f].is_categorical();
        double left_sum = 0.0, left_cnt = 0.0;
        for (int k = 0; k < nb; ++k) {
          if (categorical) {
            left_sum = sum[k];
            left_cnt = cnt[k];
          } else {
            left_sum += sum[k];
            left_cnt += cnt[k];
          }
          const double gain =
              MseGainFromSums(left_sum, left_cnt, total - left_sum,
                              idx.size() - left_cnt, h.lambda);
          if (gain > best_gain) {
            best_gain = gain;
            best = {f, categorical ? k : bins.thresholds[f][k], categorical};
          }
        }
      }
      tree.splits()[node++] = best;
      std::vector<size_t> left, right;
      for (size_t i : idx) {
        (best.GoesLeft(data.at(i, best.feature)) ? left : right).push_back(i);
      }
      next.push_back(std::move(left));
      next.push_back(std::move(right));
    }
    members = std::move(next);
  }
  for (size_t l = 0; l < members.size(); ++l) {
    double s = 0.0;
    for (size_t i : members[l]) s += g[i];
    tree.leaves()[l] = -s / (members[l].size() + h.lambda);
  }
  return tree;
}

}  // namespace

double MseGainFromSums(double sum_left, double n_left, double sum_right,
                       double n_right, double lambda) {
  return sum_left * sum_left / (n_left + lambda) +
         sum_right * sum_right / (n_right + lambda);
}

void FillLeavesExact(Tree& tree, const Dataset& data,
                     std::span<const double> gradients,
                     std::span<const size_t> indices, double lambda) {
  std::vector<double> sum(tree.num_leaves(), 0.0), cnt(tree.num_leaves(), 0.0);
  for (size_t i : indices) {
    const size_t l = tree.LeafIndex(data.row(i));
    sum[l] += gradients[i];
    cnt[l] += 1.0;
  }
  for (size_t l = 0; l < tree.num_leaves(); ++l) {
    tree.leaves()[l] = -sum[l] / (cnt[l] + lambda);
  }
}

absl::StatusOr<Ensemble> TrainNonPrivate(const Dataset& data,
                                         const Hyperparameters& h,
                                         int max_bins) {
  if (data.empty()) return absl::InvalidArgumentError("empty training set");
  if (h.depth < 1) return absl::InvalidArgumentError("depth must be >= 1");
  const LossKind loss = LossForTask(data.task());
  Ensemble e;
  e.eta = h.eta;
  e.loss = loss;
  double mean = 0.0;
  for (double y : data.labels()) mean += y;
  e.init_score = InitScoreToRaw(loss, mean / data.size());

  const Binning bins = BuildBinning(data, max_bins);
  std::vector<double> raw(data.size(), e.init_score), g(data.size());
  for (int t = 0; t < h.total_rounds(); ++t) {
    for (size_t i = 0; i < data.size(); ++i) {
      g[i] = Gradient(loss, data.label(i), raw[i]);
    }
    Tree tree = GrowTree(data, bins, g, h);
    for (size_t i = 0; i < data.size(); ++i) raw[i] += h.eta * tree.Evaluate(data.row(i));
    e.trees.push_back(std::move(tree));
  }
  return e;
}

}  // namespace sgbdt
