// Copyright 2026 The SplitMix Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "splitmix/rng.h"

#include <cmath>
#include <numbers>

#include "splitmix/error.h"

namespace splitmix {
namespace {

uint64_t SplitMix64(uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t Rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

SeededRng::SeededRng(uint64_t seed, uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  uint64_t stream_mix = stream_id;
  const uint64_t stream_key = SplitMix64(stream_mix);
  uint64_t x = seed ^ stream_key;
  for (auto& word : state_) word = SplitMix64(x);
  // xoshiro must not start from the all-zero state.
  if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[0] = 1;
}

uint64_t SeededRng::NextU64() {
  const uint64_t result = Rotl(state_[1] * 5, 7) * 9;
  const uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = Rotl(state_[3], 45);
  return result;
}

double SeededRng::NextUniform() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

uint64_t SeededRng::NextBelow(uint64_t bound) {
  if (bound == 0) ThrowParameter("NextBelow: bound must be positive");
  // Rejection sampling on the top of the range keeps the draw unbiased.
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t v;
  do {
    v = NextU64();
  } while (v >= limit);
  return v % bound;
}

double SeededRng::NextGaussian() {
  if (has_spare_gaussian_) {
    has_spare_gaussian_ = false;
    return spare_gaussian_;
  }
  // Box-Muller; u1 in (0, 1] so the log is finite.
  const double u1 = 1.0 - NextUniform();
  const double u2 = NextUniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_gaussian_ = radius * std::sin(angle);
  has_spare_gaussian_ = true;
  return radius * std::cos(angle);
}

double SeededRng::NextGamma(double shape) {
  if (!(shape > 0.0)) ThrowParameter("NextGamma: shape must be positive");
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a + 1) * U^(1/a).
    const double g = NextGamma(shape + 1.0);
    const double u = 1.0 - NextUniform();
    return g * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  while (true) {
    double x, v;
    do {
      x = NextGaussian();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = 1.0 - NextUniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

SeededRng SeededRng::Fork(uint64_t child) const {
  uint64_t mix = stream_id_ ^ (child * 0xD1B54A32D192ED03ULL);
  return SeededRng(seed_ ^ SplitMix64(mix), child + 0x632BE59BD9B4E019ULL);
}

Tensor SampleGaussian(SeededRng& rng, const std::vector<size_t>& shape,
                      double sigma) {
  if (!(sigma >= 0.0)) ThrowParameter("SampleGaussian: sigma must be >= 0");
  Tensor out(shape);
  if (sigma == 0.0) return out;
  for (double& v : out.data()) v = sigma * rng.NextGaussian();
  return out;
}

std::vector<double> SampleDirichlet(SeededRng& rng,
                                    std::span<const double> concentration) {
  if (concentration.empty()) {
    ThrowParameter("SampleDirichlet: empty concentration vector");
  }
  for (double a : concentration) {
    if (!(a > 0.0)) {
      ThrowParameter("SampleDirichlet: concentration parameters must be > 0");
    }
  }
  std::vector<double> draws(concentration.size());
  double total = 0.0;
  for (size_t i = 0; i < draws.size(); ++i) {
    draws[i] = rng.NextGamma(concentration[i]);
    total += draws[i];
  }
  if (!(total > 0.0)) {
    // Every Gamma draw underflowed (tiny concentrations); fall back to a
    // vertex of the simplex chosen uniformly.
    std::vector<double> vertex(draws.size(), 0.0);
    vertex[rng.NextBelow(draws.size())] = 1.0;
    return vertex;
  }
  for (double& v : draws) v /= total;
  return draws;
}

}  // namespace splitmix
