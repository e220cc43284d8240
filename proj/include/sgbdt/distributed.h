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

#ifndef SGBDT_DISTRIBUTED_H_
#define SGBDT_DISTRIBUTED_H_

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "nlohmann/json.hpp"
#include "sgbdt/accountant.h"
#include "sgbdt/dataset.h"
#include "sgbdt/ensemble.h"
#include "sgbdt/hyperparameters.h"

namespace sgbdt {

// Fixed-point encoding used by the simulated secure aggregation: values are
// scaled by 2^fraction_bits and rounded into int64; masked sums wrap mod 2^64.
struct FixedPoint {
  int fraction_bits = 32;

  double step() const { return std::ldexp(1.0, -fraction_bits); }
  // Fails when |x| * 2^bits does not fit with headroom for `num_terms` terms.
  absl::StatusOr<int64_t> Encode(double x, int num_terms) const;
  double Decode(int64_t q) const { return std::ldexp(double(q), -fraction_bits); }
};

// Party u's contribution: its quantised vector plus pairwise masks that
// cancel in the sum over all parties (u adds m_uv for v > u, subtracts m_vu
// for v < u).
absl::StatusOr<std::vector<uint64_t>> MaskContribution(
    std::span<const double> w, int party, int num_parties, uint64_t mask_seed,
    const FixedPoint& fp);

// Sum of masked contributions, decoded. Only this value is revealed.
std::vector<double> UnmaskSum(const std::vector<std::vector<uint64_t>>& masked,
                              const FixedPoint& fp);

// Convenience: masks, sums and decodes in one go.
absl::StatusOr<std::vector<double>> SecureAggregate(
    const std::vector<std::vector<double>>& vectors, uint64_t mask_seed,
    const FixedPoint& fp = {});

// Splits rows into k shards of near-equal size after a seeded shuffle.
std::vector<Dataset> PartitionUniform(const Dataset& data, int k,
                                      uint64_t seed);

// One cross-party message.
struct TranscriptEntry {
  std::string kind;  // hyperparameters | public_seed | masked_vector | aggregate
  int round = -1;
  int from = -1;     // -1: bulletin board / aggregator
  size_t length = 0;
};

struct DistributedOptions {
  FixedPoint fixed_point;
  // Keep every party's unmasked leaf vector per round (test oracle only;
  // such vectors never cross party boundaries in the protocol).
  bool keep_local_contributions = false;
};

struct DistributedResult {
  AccountantPlan plan;
  Ensemble ensemble;               // party 0's replica
  std::vector<Ensemble> replicas;  // one per party
  std::vector<TranscriptEntry> transcript;
  std::vector<nlohmann::json> ledgers;  // per-party ledger summaries
  // [round][party] -> local leaf vector, when requested.
  std::vector<std::vector<std::vector<double>>> local_contributions;
  int rounds_replicas_identical = 0;
};

// Runs one thread per party. Party u's private randomness is derived from
// `seed` (party 0 uses exactly the streams of a single-process run with the
// same seed) and tree structure comes from a shared public stream. The
// initial score is 0 and leaves are set to the aggregate divided by k.
absl::StatusOr<DistributedResult> DistributedTrain(
    const std::vector<Dataset>& parties, const Hyperparameters& h,
    uint64_t seed, const DistributedOptions& options = {});

}  // namespace sgbdt

#endif  // SGBDT_DISTRIBUTED_H_
