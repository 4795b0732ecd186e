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

// The mixer role: mixing ratios on the simplex and the per-client patch masks
// that partition a sample's patch indices.

#ifndef SPLITMIX_MIXER_H_
#define SPLITMIX_MIXER_H_

#include <cstdint>
#include <span>
#include <vector>

#include "splitmix/rng.h"

namespace splitmix {

struct MixingRatios {
  std::vector<double> lambdas;

  size_t size() const { return lambdas.size(); }
  double Max() const;
  // Each λ in [0, 1] and Σλ = 1 within `tolerance`.
  void Validate(double tolerance = 1e-9) const;
};

enum class LambdaMode { kUniform, kDirichlet };

struct LambdaSpec {
  LambdaMode mode = LambdaMode::kUniform;
  double concentration = 1.0;  // Symmetric Dirichlet parameter.
};

// Uniform mode returns exactly 1/n per client and consumes no randomness.
MixingRatios DrawMixingRatios(SeededRng& rng, int group_size,
                              const LambdaSpec& spec);

struct PatchMask {
  int client_id = 0;
  int num_patches = 0;
  std::vector<int> selected;  // Sorted ascending.

  static PatchMask Full(int client_id, int num_patches);
  static PatchMask Empty(int client_id, int num_patches);
  bool Contains(int patch) const;
  // Per-patch 0/1 indicator of length num_patches.
  std::vector<uint8_t> Indicator() const;
};

// Largest-remainder apportionment of λ_i·N: floor first, then one extra patch
// each to the largest fractional remainders (ties to the lower index).
std::vector<int> ApportionPatches(std::span<const double> lambdas,
                                  int num_patches);

// Masks for one mixing group. A uniformly random permutation of the patch
// indices is sliced by the apportioned quotas, so the masks are pairwise
// disjoint and cover every patch. client_ids defaults to 0..n-1.
std::vector<PatchMask> BuildPatchMasks(SeededRng& rng,
                                       const MixingRatios& ratios,
                                       int num_patches,
                                       std::span<const int> client_ids = {});

// Throws a protocol error unless the masks are disjoint and cover
// {0, ..., num_patches - 1}.
void CheckPartition(std::span<const PatchMask> masks, int num_patches);

// Owner map: entry k is the position (within `masks`) of the mask holding
// patch k. Requires a partition and at most 255 masks.
std::vector<uint8_t> OwnerMap(std::span<const PatchMask> masks,
                              int num_patches);
std::vector<PatchMask> MasksFromOwnerMap(std::span<const uint8_t> owners,
                                         int group_size,
                                         std::span<const int> client_ids = {});

}  // namespace splitmix

#endif  // SPLITMIX_MIXER_H_
