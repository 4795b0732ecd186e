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

#ifndef SPLITMIX_RNG_H_
#define SPLITMIX_RNG_H_

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "splitmix/tensor.h"

namespace splitmix {

// Reproducible random stream identified by (seed, stream_id).
//
// The generator is xoshiro256** whose state is derived from the pair with
// SplitMix64, and all distributions (uniform, Gaussian, Gamma) are implemented
// here rather than taken from <random>, whose distribution algorithms are
// implementation-defined. Identical (seed, stream_id) therefore yields an
// identical sequence on every platform with IEEE doubles.
class SeededRng {
 public:
  SeededRng(uint64_t seed, uint64_t stream_id);

  uint64_t seed() const { return seed_; }
  uint64_t stream_id() const { return stream_id_; }

  uint64_t NextU64();
  // Uniform in [0, 1) with 53 bits of resolution.
  double NextUniform();
  // Uniform integer in [0, bound). bound must be > 0.
  uint64_t NextBelow(uint64_t bound);
  double NextGaussian();
  // Gamma(shape, 1), shape > 0 (Marsaglia-Tsang).
  double NextGamma(double shape);

  // Independent child stream, deterministic in (this stream, child).
  SeededRng Fork(uint64_t child) const;

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      const size_t j = static_cast<size_t>(NextBelow(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  uint64_t seed_;
  uint64_t stream_id_;
  std::array<uint64_t, 4> state_;
  bool has_spare_gaussian_ = false;
  double spare_gaussian_ = 0.0;
};

// i.i.d. N(0, sigma²) entries. sigma < 0 is a parameter error; sigma == 0
// returns zeros without consuming randomness.
Tensor SampleGaussian(SeededRng& rng, const std::vector<size_t>& shape,
                      double sigma);

// Dirichlet draw via normalized Gamma variates.
std::vector<double> SampleDirichlet(SeededRng& rng,
                                    std::span<const double> concentration);

}  // namespace splitmix

#endif  // SPLITMIX_RNG_H_
