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

#include "splitmix/interpolation.h"

#include <algorithm>
#include <cmath>

#include "splitmix/error.h"

namespace splitmix {
namespace {

void RequireLambdaSum(double total, const char* what) {
  if (std::abs(total - 1.0) > 1e-9) {
    ThrowParameter(std::string(what) + ": lambdas sum to " +
                   std::to_string(total) + ", expected 1");
  }
}

}  // namespace

int SquareGridSide(int num_patches) {
  const int side =
      static_cast<int>(std::lround(std::sqrt(static_cast<double>(num_patches))));
  if (side * side != num_patches) {
    ThrowParameter("patch count " + std::to_string(num_patches) +
                   " does not form a square grid");
  }
  return side;
}

SmashedData Cutout(const SmashedData& s, const PatchMask& mask) {
  if (mask.num_patches != s.num_patches()) {
    ThrowShape("Cutout: mask covers " + std::to_string(mask.num_patches) +
               " patches, data has " + std::to_string(s.num_patches()));
  }
  SmashedData out{Tensor::Matrix(s.patches.rows(), s.patches.cols()),
                  s.client_id};
  for (int p : mask.selected) {
    auto src = s.patches.row(p);
    std::copy(src.begin(), src.end(), out.patches.row(p).begin());
  }
  return out;
}

SmashedData PatchCutMixAggregate(std::span<const MaskedUpload> uploads) {
  if (uploads.empty()) ThrowParameter("PatchCutMixAggregate: no uploads");
  const Tensor& first = uploads.front().data.patches;
  std::vector<PatchMask> masks;
  masks.reserve(uploads.size());
  for (const MaskedUpload& u : uploads) {
    if (!u.data.patches.SameShape(first)) {
      ThrowShape("PatchCutMixAggregate: upload shapes differ");
    }
    masks.push_back(u.mask);
  }
  CheckPartition(masks, static_cast<int>(first.rows()));
  SmashedData out{Tensor(first.shape()), uploads.front().data.client_id};
  for (const MaskedUpload& u : uploads) AddInPlace(out.patches, u.data.patches);
  return out;
}

SmashedData Mixup(std::span<const WeightedSmashed> items) {
  if (items.empty()) ThrowParameter("Mixup: no inputs");
  double total = 0.0;
  for (const auto& item : items) total += item.lambda;
  RequireLambdaSum(total, "Mixup");
  const Tensor& first = items.front().data.patches;
  SmashedData out{Tensor(first.shape()), items.front().data.client_id};
  for (const auto& item : items) {
    if (!item.data.patches.SameShape(first)) {
      ThrowShape("Mixup: input shapes differ");
    }
    Axpy(item.lambda, item.data.patches, out.patches);
  }
  return out;
}

void CutMixBoxSides(int grid_h, int grid_w, double lambda_a, int* box_h,
                    int* box_w) {
  if (!(lambda_a >= 0.0 && lambda_a <= 1.0)) {
    ThrowParameter("CutMix: lambda outside [0, 1]");
  }
  const double ratio = std::sqrt(1.0 - lambda_a);
  *box_w = static_cast<int>(std::floor(grid_w * ratio));
  *box_h = static_cast<int>(std::floor(grid_h * ratio));
}

CutMixBox DrawCutMixBox(SeededRng& rng, int grid_h, int grid_w,
                        double lambda_a) {
  int box_h = 0, box_w = 0;
  CutMixBoxSides(grid_h, grid_w, lambda_a, &box_h, &box_w);
  const int cx = static_cast<int>(rng.NextBelow(grid_w));
  const int cy = static_cast<int>(rng.NextBelow(grid_h));
  CutMixBox box;
  box.x0 = std::clamp(cx - box_w / 2, 0, grid_w);
  box.x1 = std::clamp(cx - box_w / 2 + box_w, 0, grid_w);
  box.y0 = std::clamp(cy - box_h / 2, 0, grid_h);
  box.y1 = std::clamp(cy - box_h / 2 + box_h, 0, grid_h);
  return box;
}

VanillaCutMixResult VanillaCutMixWithBox(const SmashedData& a,
                                         const SmashedData& b,
                                         const CutMixBox& box) {
  if (!a.patches.SameShape(b.patches)) {
    ThrowShape("VanillaCutMix: input shapes differ");
  }
  const int side = SquareGridSide(a.num_patches());
  VanillaCutMixResult result{a, 1.0, box};
  int replaced = 0;
  for (int y = 0; y < side; ++y) {
    for (int x = 0; x < side; ++x) {
      if (!box.Contains(x, y)) continue;
      const int p = y * side + x;
      auto src = b.patches.row(p);
      std::copy(src.begin(), src.end(), result.mixed.patches.row(p).begin());
      ++replaced;
    }
  }
  result.lambda = 1.0 - static_cast<double>(replaced) / (side * side);
  return result;
}

VanillaCutMixResult VanillaCutMix(const SmashedData& a, const SmashedData& b,
                                  double lambda_a, SeededRng& rng) {
  const int side = SquareGridSide(a.num_patches());
  const CutMixBox box = DrawCutMixBox(rng, side, side, lambda_a);
  return VanillaCutMixWithBox(a, b, box);
}

PatchMask CutoutBoxMask(SeededRng& rng, int grid_h, int grid_w, int client_id) {
  if (grid_h < 1 || grid_w < 1) ThrowParameter("CutoutBoxMask: empty grid");
  const int side = std::max(1, std::min(grid_h, grid_w) / 2);
  const int cy = static_cast<int>(rng.NextBelow(grid_h));
  const int cx = static_cast<int>(rng.NextBelow(grid_w));
  const CutMixBox box{std::max(0, cx - side / 2), std::max(0, cy - side / 2),
                      std::min(grid_w, cx - side / 2 + side),
                      std::min(grid_h, cy - side / 2 + side)};
  PatchMask mask;
  mask.client_id = client_id;
  mask.num_patches = grid_h * grid_w;
  for (int y = 0; y < grid_h; ++y) {
    for (int x = 0; x < grid_w; ++x) {
      if (!box.Contains(x, y)) mask.selected.push_back(y * grid_w + x);
    }
  }
  return mask;
}

std::vector<uint8_t> BoxCutMixOwners(SeededRng& rng,
                                     std::span<const double> lambdas,
                                     int grid_h, int grid_w) {
  if (lambdas.empty() || lambdas.size() > 255) {
    ThrowParameter("BoxCutMixOwners: group size must be in [1, 255]");
  }
  std::vector<uint8_t> owners(static_cast<size_t>(grid_h) * grid_w, 0);
  double cumulative = lambdas[0];
  for (size_t j = 1; j < lambdas.size(); ++j) {
    cumulative += lambdas[j];
    const double share = cumulative > 0.0 ? lambdas[j] / cumulative : 0.0;
    const CutMixBox box =
        DrawCutMixBox(rng, grid_h, grid_w, std::clamp(1.0 - share, 0.0, 1.0));
    for (int y = box.y0; y < box.y1; ++y) {
      for (int x = box.x0; x < box.x1; ++x) {
        owners[static_cast<size_t>(y) * grid_w + x] = static_cast<uint8_t>(j);
      }
    }
  }
  return owners;
}

Tensor MixLabels(std::span<const WeightedLabel> labels) {
  if (labels.empty()) ThrowParameter("MixLabels: no labels");
  double total = 0.0;
  for (const auto& l : labels) total += l.lambda;
  RequireLambdaSum(total, "MixLabels");
  Tensor out(labels.front().label.shape());
  for (const auto& l : labels) {
    if (!l.label.SameShape(out)) ThrowShape("MixLabels: label dimensions differ");
    Axpy(l.lambda, l.label, out);
  }
  return out;
}

}  // namespace splitmix
