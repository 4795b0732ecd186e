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

// Interpolation schemes on patchified data: Cutout, Mixup, bounding-box
// ("vanilla") CutMix and patch-level CutMix aggregation, plus label mixing.
//
// Smashed data are N × F matrices whose rows are patches. Raw images are
// handled by the same code with one pixel per patch (F = channels).

#ifndef SPLITMIX_INTERPOLATION_H_
#define SPLITMIX_INTERPOLATION_H_

#include <cstdint>
#include <span>
#include <vector>

#include "splitmix/mixer.h"
#include "splitmix/rng.h"
#include "splitmix/tensor.h"

namespace splitmix {

struct SmashedData {
  Tensor patches;  // N × F
  int client_id = 0;

  int num_patches() const { return static_cast<int>(patches.rows()); }
  int feature_dim() const { return static_cast<int>(patches.cols()); }
};

enum class MixKind : uint8_t {
  kNone,          // A single client's data, unmixed.
  kMixup,         // Σ λ_i s_i over whole tensors.
  kPatchCutMix,   // Σ M_i ⊙ s_i with a partition of patches.
  kBoxCutMix,     // Bounding-box CutMix; ownership recorded as masks.
};

struct Contributor {
  int client_id = 0;
  double lambda = 1.0;
  PatchMask mask;  // Patches taken from this client (full for kNone/kMixup).
};

struct MixedBatchItem {
  MixKind kind = MixKind::kNone;
  SmashedData smashed;
  Tensor label;  // Soft label of length D_y.
  std::vector<Contributor> contributors;
};

// Keeps the rows in mask.selected and zeroes the rest.
SmashedData Cutout(const SmashedData& s, const PatchMask& mask);

struct MaskedUpload {
  SmashedData data;
  PatchMask mask;
};

// Elementwise sum of Cutout uploads whose masks partition the patches.
// Throws a protocol error if they do not.
SmashedData PatchCutMixAggregate(std::span<const MaskedUpload> uploads);

struct WeightedSmashed {
  SmashedData data;
  double lambda = 1.0;
};

// Σ λ_i s_i; the λ must sum to 1 within 1e-9.
SmashedData Mixup(std::span<const WeightedSmashed> items);

// Half-open rectangle [x0, x1) × [y0, y1) on the patch grid.
struct CutMixBox {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  int Area() const { return (x1 - x0) * (y1 - y0); }
  bool Contains(int x, int y) const {
    return x >= x0 && x < x1 && y >= y0 && y < y1;
  }
};

// Unclipped side lengths floor(√(1-λ)·W) × floor(√(1-λ)·H).
void CutMixBoxSides(int grid_h, int grid_w, double lambda_a, int* box_h,
                    int* box_w);

// Uniform centre, box of side ratio √(1-λ) clipped to the grid.
CutMixBox DrawCutMixBox(SeededRng& rng, int grid_h, int grid_w,
                        double lambda_a);

struct VanillaCutMixResult {
  SmashedData mixed;
  double lambda = 1.0;  // Realized share of `a` after clipping.
  CutMixBox box;
};

// Square patch grid (√N × √N) required.
VanillaCutMixResult VanillaCutMix(const SmashedData& a, const SmashedData& b,
                                  double lambda_a, SeededRng& rng);
VanillaCutMixResult VanillaCutMixWithBox(const SmashedData& a,
                                         const SmashedData& b,
                                         const CutMixBox& box);

// Cutout-style augmentation mask: every patch except those inside a square
// of side max(1, min(grid_h, grid_w) / 2) whose centre is uniform over the
// grid (the square is clipped at the border, so it can be smaller).
PatchMask CutoutBoxMask(SeededRng& rng, int grid_h, int grid_w, int client_id);

// Grid-cell owner map for a group: cells start with client 0 and client j
// pastes a box of area fraction λ_j / (λ_0 + ... + λ_j) on top. For two
// clients this is exactly VanillaCutMix with λ_a = λ_0.
std::vector<uint8_t> BoxCutMixOwners(SeededRng& rng,
                                     std::span<const double> lambdas,
                                     int grid_h, int grid_w);

struct WeightedLabel {
  Tensor label;
  double lambda = 1.0;
};

// Σ λ_i y_i.
Tensor MixLabels(std::span<const WeightedLabel> labels);

// Side of the square patch grid; throws if N is not a perfect square.
int SquareGridSide(int num_patches);

}  // namespace splitmix

#endif  // SPLITMIX_INTERPOLATION_H_
