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

#include "splitmix/dp_mechanism.h"

#include <algorithm>

#include "splitmix/error.h"

namespace splitmix {

void PrivacyParams::Validate() const {
  if (!(delta_bound > 0.0)) ThrowParameter("privacy: delta_bound must be > 0");
  if (!(sigma_s >= 0.0)) ThrowParameter("privacy: sigma_s must be >= 0");
  if (!(sigma_y >= 0.0)) ThrowParameter("privacy: sigma_y must be >= 0");
  if (d_s < 1 || d_y < 1) ThrowParameter("privacy: d_s and d_y must be >= 1");
  if (!(alpha > 1.0)) ThrowParameter("privacy: alpha must be > 1");
}

Tensor ClampSmashed(const Tensor& smashed, double delta_bound) {
  if (!(delta_bound > 0.0)) ThrowParameter("ClampSmashed: delta_bound must be > 0");
  Tensor out = smashed;
  for (double& v : out.data()) v = v > 0.0 ? std::min(v, delta_bound) : 0.0;
  return out;
}

Tensor ClampGradient(const Tensor& pre_clamp, const Tensor& grad,
                     double delta_bound) {
  if (!pre_clamp.SameShape(grad)) {
    ThrowShape("ClampGradient: " + pre_clamp.ShapeString() + " vs " +
               grad.ShapeString());
  }
  Tensor out = grad;
  for (size_t i = 0; i < out.size(); ++i) {
    if (!(pre_clamp[i] > 0.0 && pre_clamp[i] < delta_bound)) out[i] = 0.0;
  }
  return out;
}

Tensor GaussianizeSmashed(SeededRng& rng, const Tensor& masked,
                          const PatchMask& mask, double sigma_s) {
  if (!(sigma_s >= 0.0)) ThrowParameter("GaussianizeSmashed: sigma_s must be >= 0");
  if (masked.rank() != 2 ||
      masked.rows() != static_cast<size_t>(mask.num_patches)) {
    ThrowShape("GaussianizeSmashed: tensor " + masked.ShapeString() +
               " does not have " + std::to_string(mask.num_patches) +
               " patch rows");
  }
  Tensor out = masked;
  if (sigma_s == 0.0) return out;
  for (int p : mask.selected) {
    for (double& v : out.row(p)) v += sigma_s * rng.NextGaussian();
  }
  return out;
}

Tensor GaussianizeLabel(SeededRng& rng, const Tensor& label, double sigma_y) {
  if (!(sigma_y >= 0.0)) ThrowParameter("GaussianizeLabel: sigma_y must be >= 0");
  Tensor out = label;
  if (sigma_y == 0.0) return out;
  for (double& v : out.data()) v += sigma_y * rng.NextGaussian();
  return out;
}

Tensor OneHot(int cls, int num_classes) {
  if (cls < 0 || cls >= num_classes) ThrowParameter("OneHot: class out of range");
  Tensor out({static_cast<size_t>(num_classes)});
  out[cls] = 1.0;
  return out;
}

}  // namespace splitmix
