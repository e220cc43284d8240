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

#ifndef SGBDT_NONPRIVATE_H_
#define SGBDT_NONPRIVATE_H_

#include <cstdint>
#include <span>

#include "absl/status/statusor.h"
#include "sgbdt/dataset.h"
#include "sgbdt/ensemble.h"
#include "sgbdt/hyperparameters.h"
#include "sgbdt/tree.h"

namespace sgbdt {

// Gain of a split: (sum g_L)^2 / (|L| + lambda) + (sum g_R)^2 / (|R| + lambda).
double MseGainFromSums(double sum_left, double n_left, double sum_right,
                       double n_right, double lambda);

// Exact leaves -sum g / (|I| + lambda) over the given points.
void FillLeavesExact(Tree& tree, const Dataset& data,
                     std::span<const double> gradients,
                     std::span<const size_t> indices, double lambda);

// Non-private greedy gradient boosting on quantile histograms, with complete
// trees of the configured depth. Uses depth, eta, lambda and
// t_regular + t_extra rounds from `h`; the initial score is the label mean.
absl::StatusOr<Ensemble> TrainNonPrivate(const Dataset& data,
                                         const Hyperparameters& h,
                                         int max_bins = 64);

}  // namespace sgbdt

#endif  // SGBDT_NONPRIVATE_H_
