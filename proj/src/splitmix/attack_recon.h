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

// Reconstruction attack on cut-layer representations: a two-layer decoder
// (per-patch linear map to a low-resolution feature image, nearest-neighbour
// upsampling, 3×3 convolution to the pixel channels) trained with MSE.
// Neither layer has a bias, so the decoder is linear in its input.

#ifndef SPLITMIX_ATTACK_RECON_H_
#define SPLITMIX_ATTACK_RECON_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "splitmix/config.h"
#include "splitmix/rng.h"
#include "splitmix/tensor.h"

namespace splitmix {

struct DecoderConfig {
  int grid_h = 4;  // Patch grid of the representation.
  int grid_w = 4;
  int patch_size = 4;
  int in_dim = 32;  // Features per patch row.
  int out_channels = 1;
  int hidden_channels = 4;
  int upsample = 1;  // Must divide patch_size.

  int height() const { return grid_h * patch_size; }
  int width() const { return grid_w * patch_size; }
  void Validate() const;
};

struct Decoder {
  DecoderConfig config;
  Tensor stage1;  // in_dim × ((P/u)²·hidden)
  Tensor kernel;  // 3 × 3 × hidden × out_channels
  double input_scale = 1.0;  // Multiplies the representation first.
};

Decoder InitDecoder(const DecoderConfig& config, SeededRng& rng);

// N × in_dim representation -> H × W × out_channels image.
Tensor DecoderForward(const Decoder& decoder, const Tensor& representation);

struct AttackPair {
  Tensor representation;  // N × in_dim
  Tensor image;           // H × W × C
};

struct DecoderTraining {
  int epochs = 40;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 16;
};

// Minibatch SGD with momentum on the mean squared pixel error. The input
// scale is fixed first to 1 / RMS of the training representations. Throws a
// parameter error for an empty training set.
Decoder TrainDecoder(SeededRng& rng, const DecoderConfig& config,
                     std::span<const AttackPair> pairs,
                     const DecoderTraining& training);

// Mean over pairs of the per-image mean squared error.
double ReconstructionMse(const Decoder& decoder,
                         std::span<const AttackPair> pairs);

// Gradient of the mean over `pairs` of per-image MSE, in the order
// (stage1, kernel). Exposed for gradient checks.
std::vector<Tensor> DecoderGradients(const Decoder& decoder,
                                     std::span<const AttackPair> pairs,
                                     double* loss);

enum class LeakageScheme { kRawSmashed, kMixup, kPatchCutMix, kCutout };
std::string LeakageSchemeName(LeakageScheme scheme);
std::vector<LeakageScheme> AllLeakageSchemes();

struct LeakageRow {
  LeakageScheme scheme = LeakageScheme::kRawSmashed;
  double train_fraction = 1.0;
  uint64_t seed = 0;
  double mse = 0.0;
};

struct LeakageReport {
  std::vector<LeakageRow> rows;

  // Median MSE over seeds; throws if there is no matching row.
  double Median(LeakageScheme scheme, double train_fraction) const;
  // CSV with header scheme,train_fraction,seed,mse.
  std::string ToCsv() const;
};

// For each seed (config.seed + k, k < attack.num_seeds): pretrain a lower
// segment with plain split learning for attack.pretrain_epochs, build
// noise-free representations for every scheme (targets are the first
// contributor's raw image; mixing groups have attack.group_size members with
// uniform ratios), and train one decoder per (scheme, train fraction).
LeakageReport RunLeakageSweep(const ExperimentConfig& config);

}  // namespace splitmix

#endif  // SPLITMIX_ATTACK_RECON_H_
