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

#include "splitmix/attack_recon.h"

#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "splitmix/error.h"

namespace splitmix {
namespace {

DecoderConfig TinyDecoderConfig(int upsample) {
  DecoderConfig c;
  c.grid_h = 2;
  c.grid_w = 3;
  c.patch_size = 2;
  c.in_dim = 3;
  c.out_channels = 2;
  c.hidden_channels = 2;
  c.upsample = upsample;
  return c;
}

Tensor Random(SeededRng& rng, std::vector<size_t> shape) {
  Tensor t(std::move(shape));
  for (double& v : t.data()) v = rng.NextGaussian();
  return t;
}

std::vector<AttackPair> RandomPairs(SeededRng& rng, const DecoderConfig& c,
                                    int count) {
  std::vector<AttackPair> pairs;
  for (int i = 0; i < count; ++i) {
    Tensor img({static_cast<size_t>(c.height()), static_cast<size_t>(c.width()),
                static_cast<size_t>(c.out_channels)});
    for (double& v : img.data()) v = rng.NextUniform();
    pairs.push_back({Random(rng, {static_cast<size_t>(c.grid_h * c.grid_w),
                                  static_cast<size_t>(c.in_dim)}),
                     img});
  }
  return pairs;
}

class DecoderGradientTest : public ::testing::TestWithParam<int> {};

TEST_P(DecoderGradientTest, MatchesFiniteDifferences) {
  const DecoderConfig c = TinyDecoderConfig(GetParam());
  SeededRng rng(5, 7);
  Decoder d = InitDecoder(c, rng);
  for (double& v : d.stage1.data()) v = rng.NextGaussian() * 0.5;
  for (double& v : d.kernel.data()) v = rng.NextGaussian() * 0.5;
  const std::vector<AttackPair> pairs = RandomPairs(rng, c, 3);
  double loss = 0.0;
  const std::vector<Tensor> grads = DecoderGradients(d, pairs, &loss);
  ASSERT_EQ(grads.size(), 2u);
  EXPECT_NEAR(loss, ReconstructionMse(d, pairs), 1e-12);
  Tensor* params[2] = {&d.stage1, &d.kernel};
  const double h = 1e-6;
  for (int k = 0; k < 2; ++k) {
    for (size_t i = 0; i < params[k]->size(); ++i) {
      double& w = (*params[k])[i];
      const double saved = w;
      w = saved + h;
      const double up = ReconstructionMse(d, pairs);
      w = saved - h;
      const double down = ReconstructionMse(d, pairs);
      w = saved;
      const double fd = (up - down) / (2 * h);
      EXPECT_NEAR(grads[k][i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Upsampling, DecoderGradientTest, ::testing::Values(1, 2));

TEST(DecoderTest, OutputShapeAndLinearity) {
  const DecoderConfig c = TinyDecoderConfig(2);
  SeededRng rng(6, 7);
  const Decoder d = InitDecoder(c, rng);
  const Tensor a = Random(rng, {6, 3});
  const Tensor b = Random(rng, {6, 3});
  const Tensor ya = DecoderForward(d, a);
  EXPECT_EQ(ya.ShapeString(), "[4x6x2]");
  const Tensor yab = DecoderForward(d, Add(a, b));
  EXPECT_LE(MaxAbsDiff(yab, Add(ya, DecoderForward(d, b))), 1e-12);
  EXPECT_THROW(DecoderForward(d, Random(rng, {5, 3})), Error);
}

TEST(DecoderTest, ZeroDecoderMseIsMeanSquaredPixel) {
  const DecoderConfig c = TinyDecoderConfig(1);
  SeededRng rng(7, 7);
  Decoder d = InitDecoder(c, rng);
  d.stage1.Fill(0.0);
  const std::vector<AttackPair> pairs = RandomPairs(rng, c, 2);
  double expected = 0.0;
  for (const AttackPair& p : pairs) {
    expected += SumSquares(p.image) / static_cast<double>(p.image.size());
  }
  EXPECT_NEAR(ReconstructionMse(d, pairs), expected / 2, 1e-15);
}

TEST(DecoderTest, TrainingReducesError) {
  // Targets are a fixed linear function of the inputs, so a linear decoder
  // can fit them.
  const DecoderConfig c = TinyDecoderConfig(1);
  SeededRng rng(8, 7);
  const Decoder teacher = InitDecoder(c, rng);
  std::vector<AttackPair> pairs = RandomPairs(rng, c, 64);
  for (AttackPair& p : pairs) p.image = DecoderForward(teacher, p.representation);
  SeededRng init(9, 7);
  const Decoder start = InitDecoder(c, init);
  DecoderTraining training;
  training.epochs = 30;
  SeededRng train_rng(9, 7);
  const Decoder trained = TrainDecoder(train_rng, c, pairs, training);
  EXPECT_LT(ReconstructionMse(trained, pairs),
            0.1 * ReconstructionMse(start, pairs));
  SeededRng again(9, 7);
  EXPECT_EQ(TrainDecoder(again, c, pairs, training).stage1, trained.stage1);
  EXPECT_THROW(TrainDecoder(again, c, {}, training), Error);
}

TEST(LeakageReportTest, MedianAndCsv) {
  LeakageReport r;
  r.rows = {{LeakageScheme::kMixup, 0.1, 1, 3.0},
            {LeakageScheme::kMixup, 0.1, 2, 1.0},
            {LeakageScheme::kMixup, 0.1, 3, 2.0},
            {LeakageScheme::kCutout, 1.0, 1, 5.0},
            {LeakageScheme::kCutout, 1.0, 2, 7.0}};
  EXPECT_EQ(r.Median(LeakageScheme::kMixup, 0.1), 2.0);
  EXPECT_EQ(r.Median(LeakageScheme::kCutout, 1.0), 6.0);
  EXPECT_THROW(r.Median(LeakageScheme::kRawSmashed, 1.0), Error);
  std::istringstream csv(r.ToCsv());
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "scheme,train_fraction,seed,mse");
  std::getline(csv, line);
  EXPECT_EQ(line, "mixup,0.1,1,3");
}

TEST(LeakageSweepTest, OneRowPerSchemeFractionAndSeed) {
  ExperimentConfig c;
  c.attack.num_seeds = 2;
  c.attack.pretrain_epochs = 1;
  c.attack.train_count = 40;
  c.attack.test_count = 10;
  c.attack.epochs = 2;
  c.dataset.train_count = 40;
  c.dataset.test_count = 10;
  const LeakageReport r = RunLeakageSweep(c);
  EXPECT_EQ(r.rows.size(), 4u * 2u * 2u);
  std::set<uint64_t> seeds;
  for (const LeakageRow& row : r.rows) {
    seeds.insert(row.seed);
    EXPECT_TRUE(std::isfinite(row.mse));
    EXPECT_GT(row.mse, 0.0);
  }
  EXPECT_EQ(seeds, (std::set<uint64_t>{c.seed, c.seed + 1}));
  EXPECT_EQ(RunLeakageSweep(c).ToCsv(), r.ToCsv());
}

}  // namespace
}  // namespace splitmix
