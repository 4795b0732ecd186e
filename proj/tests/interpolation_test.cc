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

#include <gtest/gtest.h>

#include "splitmix/error.h"

namespace splitmix {
namespace {

Tensor Rows(std::initializer_list<std::initializer_list<double>> rows) {
  const size_t r = rows.size(), c = rows.begin()->size();
  Tensor t = Tensor::Matrix(r, c);
  size_t i = 0;
  for (const auto& row : rows) {
    size_t j = 0;
    for (double v : row) t(i, j++) = v;
    ++i;
  }
  return t;
}

SmashedData RandomSmashed(SeededRng& rng, int n, int f, int client) {
  Tensor t = Tensor::Matrix(n, f);
  for (double& v : t.data()) v = 0.2 * rng.NextUniform();
  return {t, client};
}

TEST(CutoutTest, HandExampleAndDegenerateMasks) {
  const SmashedData s{Rows({{1, 1}, {2, 2}}), 0};
  EXPECT_EQ(Cutout(s, PatchMask{0, 2, {0}}).patches, Rows({{1, 1}, {0, 0}}));
  EXPECT_EQ(Cutout(s, PatchMask::Full(0, 2)).patches, s.patches);
  EXPECT_EQ(Cutout(s, PatchMask::Empty(0, 2)).patches, Tensor::Matrix(2, 2));
  try {
    Cutout(s, PatchMask::Full(0, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
}

TEST(PatchCutMixTest, DisjointSum) {
  const MaskedUpload a{{Rows({{1, 1}, {0, 0}}), 0}, PatchMask{0, 2, {0}}};
  const MaskedUpload b{{Rows({{0, 0}, {4, 4}}), 1}, PatchMask{1, 2, {1}}};
  const std::vector<MaskedUpload> ab = {a, b}, ba = {b, a};
  EXPECT_EQ(PatchCutMixAggregate(ab).patches, Rows({{1, 1}, {4, 4}}));
  EXPECT_EQ(PatchCutMixAggregate(ba).patches, Rows({{1, 1}, {4, 4}}));
}

TEST(PatchCutMixTest, SingleClientIdentity) {
  SeededRng rng(1, 0);
  const SmashedData s = RandomSmashed(rng, 16, 4, 0);
  const std::vector<MaskedUpload> one = {{s, PatchMask::Full(0, 16)}};
  EXPECT_EQ(PatchCutMixAggregate(one).patches, s.patches);
}

TEST(PatchCutMixTest, EveryPatchComesFromItsOwner) {
  SeededRng rng(2, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.NextBelow(5));
    const MixingRatios r{SampleDirichlet(rng, std::vector<double>(n, 1.0))};
    const auto masks = BuildPatchMasks(rng, r, 64);
    std::vector<SmashedData> raw;
    std::vector<MaskedUpload> uploads;
    for (int c = 0; c < n; ++c) {
      raw.push_back(RandomSmashed(rng, 64, 8, c));
      uploads.push_back({Cutout(raw.back(), masks[c]), masks[c]});
    }
    const Tensor mixed = PatchCutMixAggregate(uploads).patches;
    for (int c = 0; c < n; ++c) {
      for (int p : masks[c].selected) {
        for (int f = 0; f < 8; ++f) ASSERT_EQ(mixed(p, f), raw[c].patches(p, f));
      }
    }
  }
}

TEST(PatchCutMixTest, RejectsNonPartition) {
  const MaskedUpload a{{Rows({{1}, {1}}), 0}, PatchMask{0, 2, {0, 1}}};
  const MaskedUpload b{{Rows({{0}, {4}}), 1}, PatchMask{1, 2, {1}}};
  const std::vector<MaskedUpload> ab = {a, b};
  try {
    PatchCutMixAggregate(ab);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocol);
  }
}

TEST(MixupTest, HandValues) {
  const SmashedData two{Tensor::Matrix(1, 1, 2.0), 0};
  const SmashedData four{Tensor::Matrix(1, 1, 4.0), 1};
  const std::vector<WeightedSmashed> half = {{two, 0.5}, {four, 0.5}};
  EXPECT_EQ(Mixup(half).patches(0, 0), 3.0);
  const std::vector<WeightedSmashed> one = {{two, 1.0}};
  EXPECT_EQ(Mixup(one).patches, two.patches);
  const std::vector<WeightedSmashed> bad = {{two, 0.5}, {four, 0.6}};
  EXPECT_THROW(Mixup(bad), Error);
}

TEST(MixupTest, ConvexFixedPointAndOrderInvariance) {
  SeededRng rng(3, 0);
  const SmashedData x = RandomSmashed(rng, 4, 3, 0);
  const SmashedData y = RandomSmashed(rng, 4, 3, 1);
  const std::vector<WeightedSmashed> same = {{x, 0.3}, {x, 0.7}};
  EXPECT_LT(MaxAbsDiff(Mixup(same).patches, x.patches), 1e-15);
  const std::vector<WeightedSmashed> xy = {{x, 0.25}, {y, 0.75}};
  const std::vector<WeightedSmashed> yx = {{y, 0.75}, {x, 0.25}};
  EXPECT_LT(MaxAbsDiff(Mixup(xy).patches, Mixup(yx).patches), 1e-15);
  const Tensor mixed = Mixup(xy).patches;
  for (double v : mixed.data()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 0.2);
  }
}

TEST(VanillaCutMixTest, BoxSides) {
  int h = 0, w = 0;
  CutMixBoxSides(32, 32, 0.75, &h, &w);
  EXPECT_EQ(h, 16);
  EXPECT_EQ(w, 16);
  CutMixBoxSides(8, 8, 1.0, &h, &w);
  EXPECT_EQ(h * w, 0);
}

TEST(VanillaCutMixTest, LambdaOneKeepsA) {
  SeededRng rng(4, 0);
  const SmashedData a = RandomSmashed(rng, 16, 2, 0);
  const SmashedData b = RandomSmashed(rng, 16, 2, 1);
  const VanillaCutMixResult r = VanillaCutMix(a, b, 1.0, rng);
  EXPECT_EQ(r.mixed.patches, a.patches);
  EXPECT_EQ(r.lambda, 1.0);
}

TEST(VanillaCutMixTest, FullBoxGivesB) {
  SeededRng rng(5, 0);
  const SmashedData a = RandomSmashed(rng, 16, 2, 0);
  const SmashedData b = RandomSmashed(rng, 16, 2, 1);
  const VanillaCutMixResult r = VanillaCutMixWithBox(a, b, CutMixBox{0, 0, 4, 4});
  EXPECT_EQ(r.mixed.patches, b.patches);
  EXPECT_EQ(r.lambda, 0.0);
}

TEST(VanillaCutMixTest, RealizedLambdaMatchesBoxArea) {
  SeededRng rng(6, 0);
  const SmashedData a{Tensor::Matrix(64, 1, 1.0), 0};
  const SmashedData b{Tensor::Matrix(64, 1, 0.0), 1};
  for (int t = 0; t < 200; ++t) {
    const VanillaCutMixResult r = VanillaCutMix(a, b, rng.NextUniform(), rng);
    double ones = 0.0;
    for (double v : r.mixed.patches.data()) ones += v;
    EXPECT_DOUBLE_EQ(r.lambda, ones / 64.0);
    EXPECT_DOUBLE_EQ(r.lambda, 1.0 - r.box.Area() / 64.0);
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        EXPECT_EQ(r.mixed.patches(y * 8 + x, 0), r.box.Contains(x, y) ? 0.0 : 1.0);
      }
    }
  }
}

TEST(VanillaCutMixTest, NonSquareGridIsAParameterError) {
  SeededRng rng(7, 0);
  const SmashedData a{Tensor::Matrix(8, 1), 0};
  try {
    VanillaCutMix(a, a, 0.5, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParameter);
  }
  EXPECT_EQ(SquareGridSide(49), 7);
  EXPECT_THROW(SquareGridSide(50), Error);
}

TEST(BoxOwnersTest, PartitionForAnyGroup) {
  SeededRng rng(8, 0);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng.NextBelow(4));
    const std::vector<double> l(n, 1.0 / n);
    const auto owners = BoxCutMixOwners(rng, l, 4, 4);
    ASSERT_EQ(owners.size(), 16u);
    for (uint8_t o : owners) ASSERT_LT(o, n);
    CheckPartition(MasksFromOwnerMap(owners, n), 16);
  }
}

TEST(CutoutBoxMaskTest, DropsAtMostAQuarterAsAContiguousSquare) {
  SeededRng rng(9, 0);
  for (int t = 0; t < 200; ++t) {
    const PatchMask m = CutoutBoxMask(rng, 4, 4, 3);
    EXPECT_EQ(m.client_id, 3);
    EXPECT_EQ(m.num_patches, 16);
    const int dropped = 16 - static_cast<int>(m.selected.size());
    EXPECT_GE(dropped, 1);
    EXPECT_LE(dropped, 4);
    int x0 = 4, y0 = 4, x1 = -1, y1 = -1;
    for (int p = 0; p < 16; ++p) {
      if (m.Contains(p)) continue;
      x0 = std::min(x0, p % 4);
      x1 = std::max(x1, p % 4);
      y0 = std::min(y0, p / 4);
      y1 = std::max(y1, p / 4);
    }
    EXPECT_EQ((x1 - x0 + 1) * (y1 - y0 + 1), dropped);
  }
}

TEST(MixLabelsTest, HandValues) {
  Tensor a = Tensor::Vector({1, 0, 0}), b = Tensor::Vector({0, 1, 0});
  const std::vector<WeightedLabel> ab = {{a, 0.3}, {b, 0.7}};
  const Tensor mixed = MixLabels(ab);
  EXPECT_DOUBLE_EQ(mixed[0], 0.3);
  EXPECT_DOUBLE_EQ(mixed[1], 0.7);
  EXPECT_EQ(mixed[2], 0.0);
  EXPECT_NEAR(mixed[0] + mixed[1] + mixed[2], 1.0, 1e-15);
  const std::vector<WeightedLabel> one = {{a, 1.0}};
  EXPECT_EQ(MixLabels(one), a);
  const std::vector<WeightedLabel> mismatch = {{a, 0.5}, {Tensor::Vector({1, 0}), 0.5}};
  try {
    MixLabels(mismatch);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kShape);
  }
}

}  // namespace
}  // namespace splitmix
