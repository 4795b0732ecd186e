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

#include "splitmix/mixer.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "splitmix/error.h"

namespace splitmix {

double MixingRatios::Max() const {
  if (lambdas.empty()) ThrowParameter("MixingRatios: empty");
  return *std::max_element(lambdas.begin(), lambdas.end());
}

void MixingRatios::Validate(double tolerance) const {
  if (lambdas.empty()) ThrowParameter("MixingRatios: empty");
  double total = 0.0;
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) {
      ThrowParameter("MixingRatios: lambda outside [0, 1]");
    }
    total += l;
  }
  if (std::abs(total - 1.0) > tolerance) {
    ThrowParameter("MixingRatios: lambdas sum to " + std::to_string(total) +
                   ", expected 1");
  }
}

MixingRatios DrawMixingRatios(SeededRng& rng, int group_size,
                              const LambdaSpec& spec) {
  if (group_size < 1) ThrowParameter("DrawMixingRatios: group size must be >= 1");
  MixingRatios ratios;
  if (group_size == 1) {
    ratios.lambdas = {1.0};
    return ratios;
  }
  switch (spec.mode) {
    case LambdaMode::kUniform:
      ratios.lambdas.assign(group_size, 1.0 / group_size);
      break;
    case LambdaMode::kDirichlet: {
      if (!(spec.concentration > 0.0)) {
        ThrowParameter("DrawMixingRatios: Dirichlet concentration must be > 0");
      }
      const std::vector<double> alpha(group_size, spec.concentration);
      ratios.lambdas = SampleDirichlet(rng, alpha);
      break;
    }
  }
  return ratios;
}

PatchMask PatchMask::Full(int client_id, int num_patches) {
  PatchMask m{client_id, num_patches, std::vector<int>(num_patches)};
  std::iota(m.selected.begin(), m.selected.end(), 0);
  return m;
}

PatchMask PatchMask::Empty(int client_id, int num_patches) {
  return PatchMask{client_id, num_patches, {}};
}

bool PatchMask::Contains(int patch) const {
  return std::binary_search(selected.begin(), selected.end(), patch);
}

std::vector<uint8_t> PatchMask::Indicator() const {
  std::vector<uint8_t> out(num_patches, 0);
  for (int p : selected) out[p] = 1;
  return out;
}

std::vector<int> ApportionPatches(std::span<const double> lambdas,
                                  int num_patches) {
  if (num_patches <= 0) ThrowParameter("ApportionPatches: N must be positive");
  if (lambdas.empty()) ThrowParameter("ApportionPatches: no clients");
  const size_t n = lambdas.size();
  std::vector<int> quota(n);
  std::vector<double> remainder(n);
  int assigned = 0;
  for (size_t i = 0; i < n; ++i) {
    const double exact = lambdas[i] * num_patches;
    quota[i] = static_cast<int>(std::floor(exact));
    remainder[i] = exact - quota[i];
    assigned += quota[i];
  }
  int left = num_patches - assigned;
  if (left < 0 || left > static_cast<int>(n)) {
    ThrowParameter("ApportionPatches: lambdas do not lie on the simplex");
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return remainder[a] > remainder[b];
  });
  for (size_t k = 0; k < static_cast<size_t>(left); ++k) ++quota[order[k]];
  return quota;
}

std::vector<PatchMask> BuildPatchMasks(SeededRng& rng,
                                       const MixingRatios& ratios,
                                       int num_patches,
                                       std::span<const int> client_ids) {
  if (num_patches <= 0) ThrowParameter("BuildPatchMasks: N must be positive");
  ratios.Validate();
  if (!client_ids.empty() && client_ids.size() != ratios.size()) {
    ThrowParameter("BuildPatchMasks: client id count differs from ratios");
  }
  const std::vector<int> quota = ApportionPatches(ratios.lambdas, num_patches);
  std::vector<int> permutation(num_patches);
  std::iota(permutation.begin(), permutation.end(), 0);
  rng.Shuffle(std::span<int>(permutation));

  std::vector<PatchMask> masks;
  masks.reserve(ratios.size());
  size_t cursor = 0;
  for (size_t i = 0; i < ratios.size(); ++i) {
    PatchMask mask;
    mask.client_id =
        client_ids.empty() ? static_cast<int>(i) : client_ids[i];
    mask.num_patches = num_patches;
    mask.selected.assign(permutation.begin() + cursor,
                         permutation.begin() + cursor + quota[i]);
    std::sort(mask.selected.begin(), mask.selected.end());
    cursor += quota[i];
    masks.push_back(std::move(mask));
  }
  return masks;
}

void CheckPartition(std::span<const PatchMask> masks, int num_patches) {
  std::vector<int> hits(num_patches, 0);
  for (const PatchMask& m : masks) {
    if (m.num_patches != num_patches) {
      ThrowProtocol("mask family: patch count mismatch");
    }
    for (int p : m.selected) {
      if (p < 0 || p >= num_patches) {
        ThrowProtocol("mask family: patch index out of range");
      }
      ++hits[p];
    }
  }
  for (int p = 0; p < num_patches; ++p) {
    if (hits[p] == 0) {
      ThrowProtocol("mask family does not cover patch " + std::to_string(p));
    }
    if (hits[p] > 1) {
      ThrowProtocol("mask family overlaps at patch " + std::to_string(p));
    }
  }
}

std::vector<uint8_t> OwnerMap(std::span<const PatchMask> masks,
                              int num_patches) {
  if (masks.size() > 255) ThrowParameter("OwnerMap: at most 255 masks");
  CheckPartition(masks, num_patches);
  std::vector<uint8_t> owners(num_patches, 0);
  for (size_t i = 0; i < masks.size(); ++i) {
    for (int p : masks[i].selected) owners[p] = static_cast<uint8_t>(i);
  }
  return owners;
}

std::vector<PatchMask> MasksFromOwnerMap(std::span<const uint8_t> owners,
                                         int group_size,
                                         std::span<const int> client_ids) {
  if (group_size < 1) ThrowParameter("MasksFromOwnerMap: empty group");
  const int n = static_cast<int>(owners.size());
  std::vector<PatchMask> masks(group_size);
  for (int i = 0; i < group_size; ++i) {
    masks[i].client_id = client_ids.empty() ? i : client_ids[i];
    masks[i].num_patches = n;
  }
  for (int p = 0; p < n; ++p) {
    if (owners[p] >= group_size) {
      ThrowProtocol("owner map references a client outside the group");
    }
    masks[owners[p]].selected.push_back(p);
  }
  return masks;
}

}  // namespace splitmix
