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

#include "sgbdt/random.h"

#include <cmath>

namespace sgbdt {

uint64_t MixBits(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

uint64_t DeriveSeed(uint64_t base, std::initializer_list<uint64_t> path) {
  uint64_t seed = MixBits(base);
  for (uint64_t coordinate : path) {
    seed = MixBits(seed ^ MixBits(coordinate + 0x632be59bd9b4e019ULL));
  }
  return seed;
}

double SampleUniform(Rng& rng, double a, double b) {
  // 53 random mantissa bits; never returns b.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return a + (b - a) * u;
}

double SampleGaussian(Rng& rng, double stddev) {
  if (stddev == 0.0) return 0.0;
  std::normal_distribution<double> normal(0.0, stddev);
  return normal(rng);
}

double SampleLaplace(Rng& rng, double scale) {
  if (scale == 0.0) return 0.0;
  // Inverse CDF on u in (-1/2, 1/2).
  double u = SampleUniform(rng, -0.5, 0.5);
  while (u == -0.5) u = SampleUniform(rng, -0.5, 0.5);
  return -scale * std::copysign(1.0, u) * std::log1p(-2.0 * std::fabs(u));
}

bool SampleBernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return SampleUniform(rng, 0.0, 1.0) < p;
}

}  // namespace sgbdt
