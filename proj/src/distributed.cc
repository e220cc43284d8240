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

#include "sgbdt/distributed.h"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numeric>
#include <thread>

#include "absl/strings/str_format.h"
#include "sgbdt/privacy_filter.h"
#include "sgbdt/random.h"
#include "sgbdt/sgbdt.h"

namespace sgbdt {
namespace {

uint64_t PairMask(uint64_t mask_seed, int u, int v, size_t index) {
  return MixBits(DeriveSeed(mask_seed, {uint64_t(u), uint64_t(v), index}));
}

bool BitIdentical(const Ensemble& a, const Ensemble& b) {
  if (a.trees.size() != b.trees.size() ||
      std::memcmp(&a.init_score, &b.init_score, sizeof(double)) != 0) {
    return false;
  }
  for (size_t t = 0; t < a.trees.size(); ++t) {
    const Tree& x = a.trees[t];
    const Tree& y = b.trees[t];
    if (!x.SameStructure(y)) return false;
    if (std::memcmp(x.leaves().data(), y.leaves().data(),
                    x.num_leaves() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

}  // namespace

absl::StatusOr<int64_t> FixedPoint::Encode(double x, int num_terms) const {
  const double scaled = std::ldexp(x, fraction_bits);
  // Leave room so that the sum of num_terms encodings cannot wrap.
  const double limit = std::ldexp(1.0, 62) / std::max(1, num_terms);
  if (!std::isfinite(scaled) || std::fabs(scaled) >= limit) {
    return absl::OutOfRangeError(
        absl::StrFormat("fixed-point overflow encoding %g", x));
  }
  return static_cast<int64_t>(std::llround(scaled));
}

absl::StatusOr<std::vector<uint64_t>> MaskContribution(
    std::span<const double> w, int party, int num_parties, uint64_t mask_seed,
    const FixedPoint& fp) {
  std::vector<uint64_t> out(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    absl::StatusOr<int64_t> q = fp.Encode(w[i], num_parties);
    if (!q.ok()) return q.status();
    uint64_t value = static_cast<uint64_t>(*q);
    for (int v = 0; v < num_parties; ++v) {
      if (v > party) value += PairMask(mask_seed, party, v, i);
      if (v < party) value -= PairMask(mask_seed, v, party, i);
    }
    out[i] = value;
  }
  return out;
}

std::vector<double> UnmaskSum(const std::vector<std::vector<uint64_t>>& masked,
                              const FixedPoint& fp) {
  if (masked.empty()) return {};
  std::vector<uint64_t> sum(masked[0].size(), 0);
  for (const std::vector<uint64_t>& m : masked) {
    for (size_t i = 0; i < sum.size(); ++i) sum[i] += m[i];  // mod 2^64
  }
  std::vector<double> out(sum.size());
  for (size_t i = 0; i < sum.size(); ++i) {
    out[i] = fp.Decode(static_cast<int64_t>(sum[i]));
  }
  return out;
}

absl::StatusOr<std::vector<double>> SecureAggregate(
    const std::vector<std::vector<double>>& vectors, uint64_t mask_seed,
    const FixedPoint& fp) {
  const int k = static_cast<int>(vectors.size());
  if (k == 0) return absl::InvalidArgumentError("no parties");
  std::vector<std::vector<uint64_t>> masked;
  for (int u = 0; u < k; ++u) {
    if (vectors[u].size() != vectors[0].size()) {
      return absl::InvalidArgumentError("vector lengths differ");
    }
    absl::StatusOr<std::vector<uint64_t>> m =
        MaskContribution(vectors[u], u, k, mask_seed, fp);
    if (!m.ok()) return m.status();
    masked.push_back(*std::move(m));
  }
  return UnmaskSum(masked, fp);
}

std::vector<Dataset> PartitionUniform(const Dataset& data, int k,
                                      uint64_t seed) {
  std::vector<size_t> order(data.size());
  std::iota(order.begin(), order.end(), size_t{0});
  Rng rng = MakeRng(DeriveSeed(seed, StreamTag::kPartition));
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<Dataset> shards;
  for (int u = 0; u < k; ++u) {
    const size_t begin = data.size() * u / k;
    const size_t end = data.size() * (u + 1) / k;
    shards.push_back(data.Subset(
        std::span<const size_t>(order.data() + begin, end - begin)));
  }
  return shards;
}

absl::StatusOr<DistributedResult> DistributedTrain(
    const std::vector<Dataset>& parties, const Hyperparameters& h,
    uint64_t seed, const DistributedOptions& options) {
  const int k = static_cast<int>(parties.size());
  if (k < 1) return absl::InvalidArgumentError("need at least one party");
  for (const Dataset& d : parties) {
    if (d.empty()) return absl::InvalidArgumentError("a party has no data");
  }
  if (absl::Status s = h.Validate(); !s.ok()) return s;

  DistributedResult result;
  // Bulletin board: every party receives the same hyperparameters and public
  // seed and derives the identical plan.
  const RunSeeds base = RunSeeds::FromBase(seed);
  const uint64_t public_structure_seed = base.structure;
  const uint64_t mask_seed = DeriveSeed(seed, StreamTag::kMask);
  for (int u = 0; u < k; ++u) {
    result.transcript.push_back({"hyperparameters", -1, -1, 1});
    result.transcript.push_back({"public_seed", -1, -1, 1});
  }
  absl::StatusOr<AccountantPlan> plan = Initialize(h);
  if (!plan.ok()) return plan.status();
  result.plan = *plan;

  const size_t num_leaves = size_t{1} << h.depth;
  const int rounds = h.total_rounds();
  result.replicas.resize(k);
  result.ledgers.resize(k);
  if (options.keep_local_contributions) {
    result.local_contributions.assign(rounds,
                                      std::vector<std::vector<double>>(k));
  }

  std::vector<std::vector<uint64_t>> inbox(k);
  std::vector<double> aggregate;
  std::mutex transcript_mu;
  std::atomic<bool> failed{false};
  absl::Status failure;
  int round_in_progress = 0;

  auto aggregate_step = [&]() noexcept {
    if (failed.load()) return;
    aggregate = UnmaskSum(inbox, options.fixed_point);
    for (double& a : aggregate) a /= k;
    result.transcript.push_back(
        {"aggregate", round_in_progress, -1, aggregate.size()});
  };
  auto consistency_step = [&]() noexcept {
    if (failed.load()) return;
    bool same = true;
    for (int u = 1; u < k; ++u) {
      same = same && BitIdentical(result.replicas[0], result.replicas[u]);
    }
    if (same) {
      ++result.rounds_replicas_identical;
    } else {
      failure = absl::InternalError(absl::StrFormat(
          "replicas diverged in round %d", round_in_progress));
      failed.store(true);
    }
    ++round_in_progress;
  };
  std::barrier sample_barrier(k, aggregate_step);
  std::barrier apply_barrier(k, consistency_step);

  auto party_main = [&](int u) {
    const Dataset& data = parties[u];
    const size_t n = data.size();
    const LossKind loss = LossForTask(data.task());
    RunSeeds seeds = u == 0 ? base : RunSeeds::FromBase(DeriveSeed(seed, {uint64_t(u)}));
    seeds.structure = public_structure_seed;
    Ensemble& replica = result.replicas[u];
    replica.eta = h.eta;
    replica.loss = loss;
    replica.init_score = 0.0;  // zero classifier

    const IndividualLossTable table(h, *plan);
    PrivacyLedger ledger(n, plan->alpha_hat, plan->rho_budget);
    std::vector<double> raw(n, 0.0), gradients(n), proposed(n);
    RoundContext ctx;
    ctx.h = &h;
    ctx.sigma2_leaf = plan->sigma2_leaf;
    ctx.dataset_size = n;
    ctx.seeds = seeds;
    for (int t = 0; t < rounds; ++t) {
      Tree tree;
      if (!failed.load()) {
        for (size_t i = 0; i < n; ++i) {
          gradients[i] = Clip(Gradient(loss, data.label(i), raw[i]), h.g_star);
          proposed[i] = table.Lookup(std::fabs(gradients[i]));
        }
        absl::StatusOr<std::vector<uint8_t>> active =
            ledger.FilterRoundDense(proposed, {});
        ctx.round = t;
        if (active.ok()) tree = TrainSingleTree(data, gradients, *active, ctx);
        absl::StatusOr<std::vector<uint64_t>> masked =
            active.ok() ? MaskContribution(tree.leaves(), u, k,
                                           DeriveSeed(mask_seed, {uint64_t(t)}),
                                           options.fixed_point)
                        : absl::StatusOr<std::vector<uint64_t>>(active.status());
        if (masked.ok()) {
          inbox[u] = *std::move(masked);
          if (options.keep_local_contributions) {
            result.local_contributions[t][u] = tree.leaves();
          }
          std::lock_guard<std::mutex> lock(transcript_mu);
          result.transcript.push_back({"masked_vector", t, u, num_leaves});
        } else {
          std::lock_guard<std::mutex> lock(transcript_mu);
          if (!failed.exchange(true)) failure = masked.status();
        }
      }
      sample_barrier.arrive_and_wait();
      if (!failed.load()) {
        tree.leaves() = aggregate;
        for (size_t i = 0; i < n; ++i) raw[i] += h.eta * tree.Evaluate(data.row(i));
        replica.trees.push_back(std::move(tree));
      }
      apply_barrier.arrive_and_wait();
    }
    result.ledgers[u] = ledger.SummaryJson(/*include_per_point=*/true);
  };

  std::vector<std::thread> threads;
  for (int u = 0; u < k; ++u) threads.emplace_back(party_main, u);
  for (std::thread& t : threads) t.join();
  if (failed.load()) return failure;
  result.ensemble = result.replicas[0];
  return result;
}

}  // namespace sgbdt
