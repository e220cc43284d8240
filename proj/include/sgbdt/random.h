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

#ifndef SGBDT_RANDOM_H_
#define SGBDT_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace sgbdt {

using Rng = std::mt19937_64;

// Named substreams. Every random draw in a training run comes from a stream
// derived from (run seed, stream tag, coordinates such as round and leaf), so
// that reordering or parallelising independent work never changes outputs.
enum class StreamTag : uint64_t {
  kStructure = 1,
  kSubsample = 2,
  kLeafNoise = 3,
  kInitNoise = 4,
  kPartition = 5,
  kSplitSelection = 6,
  kFolds = 7,
  kStreamBatch = 8,
  kMask = 9,
};

// SplitMix64 finaliser.
uint64_t MixBits(uint64_t x);

// Folds `path` into `base` one coordinate at a time.
uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> path);

inline uint64_t DeriveSeed(uint64_t base, StreamTag tag,
                           std::initializer_list<uint64_t> path = {}) {
  uint64_t seed = DeriveSeed(base, {static_cast<uint64_t>(tag)});
  return DeriveSeed(seed, path);
}

inline Rng MakeRng(uint64_t seed) { return Rng(seed); }

// Uniform on [a, b).
double SampleUniform(Rng& rng, double a, double b);

// Zero-mean Gaussian with the given standard deviation; stddev 0 returns 0.
double SampleGaussian(Rng& rng, double stddev);

// Zero-mean Laplace with scale b (density exp(-|x|/b) / 2b); b = 0 returns 0.
double SampleLaplace(Rng& rng, double scale);

bool SampleBernoulli(Rng& rng, double p);

// A stream of uniform draws that several parties can replay from a common
// seed. Used for the data-independent tree structure, so single-process and
// multi-party training consume randomness identically.
class PublicRandomness {
 public:
  explicit PublicRandomness(uint64_t seed) : rng_(seed) {}

  // Uniform on [a, b).
  double Uniform(double a, double b) { return SampleUniform(rng_, a, b); }

 private:
  Rng rng_;
};

}  // namespace sgbdt

#endif  // SGBDT_RANDOM_H_
