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

#ifndef SPLITMIX_DP_MECHANISM_H_
#define SPLITMIX_DP_MECHANISM_H_

#include <cstdint>

#include "splitmix/mixer.h"
#include "splitmix/rng.h"
#include "splitmix/tensor.h"

namespace splitmix {

// Parameters of the Gaussian mechanism and of its RDP accounting. The
// accounting dimensions d_s and d_y are deliberately independent of the real
// tensor shapes.
struct PrivacyParams {
  double delta_bound = 0.2;  // Per-element bound: smashed data in [0, Δ].
  double sigma_s = 1.0;      // Smashed-data noise std.
  double sigma_y = 1.0;      // Label noise std.
  int64_t d_s = 20;
  int64_t d_y = 10;
  double alpha = 2.0;  // RDP order, > 1.

  // Δ > 0, σ ≥ 0, d ≥ 1, α > 1.
  void Validate() const;

  friend bool operator==(const PrivacyParams&, const PrivacyParams&) = default;
};

// Hard-clips every element of `smashed` to [0, delta_bound].
Tensor ClampSmashed(const Tensor& smashed, double delta_bound);

// Derivative of ClampSmashed applied to an upstream gradient: passes
// grad where 0 < pre_clamp < Δ and zeroes it elsewhere.
Tensor ClampGradient(const Tensor& pre_clamp, const Tensor& grad,
                     double delta_bound);

// Adds N(0, σ_s²) noise to every element of the patch rows selected by
// `mask`; unselected rows pass through untouched (zero for Cutout input).
// `masked` is N × F with N == mask.num_patches.
Tensor GaussianizeSmashed(SeededRng& rng, const Tensor& masked,
                          const PatchMask& mask, double sigma_s);

// y + N(0, σ_y² I). No clipping afterwards.
Tensor GaussianizeLabel(SeededRng& rng, const Tensor& label, double sigma_y);

Tensor OneHot(int cls, int num_classes);

}  // namespace splitmix

#endif  // SPLITMIX_DP_MECHANISM_H_
