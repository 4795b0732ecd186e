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

#ifndef SPLITMIX_DATASET_H_
#define SPLITMIX_DATASET_H_

#include <string>
#include <vector>

#include "splitmix/config.h"
#include "splitmix/rng.h"
#include "splitmix/tensor.h"

namespace splitmix {

struct Dataset {
  int height = 0;
  int width = 0;
  int channels = 0;
  int num_classes = 0;
  std::vector<Tensor> images;  // Each H × W × C with values in [0, 1].
  std::vector<int> labels;

  size_t size() const { return images.size(); }
  // Checks shapes, value range and label range.
  void Validate() const;
};

// Class k is an oriented sinusoid (angle πk/L, frequency alternating between
// two values) with a small random phase, plus N(0, noise_std²) pixel noise,
// clipped to [0, 1]. Labels are balanced (k = i mod L, then shuffled).
Dataset GenerateSynthetic(SeededRng& rng, int num_classes, int count,
                          int height, int width, int channels,
                          double noise_std);

// Flat format: [count:4][H:4][W:4][C:4] little-endian, count·H·W·C pixel
// bytes (value / 255) in (H, W, C) order, then count label bytes.
Dataset LoadBinaryDataset(const std::string& path, int num_classes);
void SaveBinaryDataset(const std::string& path, const Dataset& data);

struct DataSplit {
  Dataset train;
  Dataset test;
};

// Synthetic: train and test generated from one stream (train first).
// Binary: seeded shuffle, then the last test_fraction becomes the test set.
// The geometry must match config.model.
DataSplit MakeDataSplit(const ExperimentConfig& config);

// Binary (P5) graymap with maxval 255; values are clipped to [0, 1].
void WritePgm(const std::string& path, const Tensor& gray);
// Reads a P5 file written by WritePgm into an H × W tensor in [0, 1].
Tensor ReadPgm(const std::string& path);

}  // namespace splitmix

#endif  // SPLITMIX_DATASET_H_
