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

#ifndef SPLITMIX_CONFIG_H_
#define SPLITMIX_CONFIG_H_

#include <cstdint>
#include <string>
#include <vector>

#include "splitmix/dp_mechanism.h"
#include "splitmix/mixer.h"
#include "splitmix/split_vit.h"

namespace splitmix {

enum class Mode {
  kPlainSl,           // Clean smashed data and labels, no mixing.
  kDpSl,              // Gaussian mechanism, no mixing.
  kDpMixSl,           // Gaussian mechanism + Mixup across a group.
  kDpCutMixSl,        // Gaussian mechanism on Cutout patches + aggregation.
  kVanillaCutMix,     // Gaussian mechanism + bounding-box CutMix.
  kStandalone,        // Each client trains a full model alone.
  kStandaloneCutout,  // Standalone with patch Cutout augmentation.
};

std::string ModeName(Mode mode);
// Throws a config error for unknown names.
Mode ParseMode(const std::string& name);
// All modes in declaration order.
std::vector<Mode> AllModes();

bool ModeUsesServer(Mode mode);
bool ModeUsesMixer(Mode mode);
bool ModeAddsNoise(Mode mode);

struct DatasetSpec {
  std::string kind = "synthetic";  // "synthetic" or "binary"
  int train_count = 400;
  int test_count = 200;
  double noise_std = 0.15;  // Synthetic pixel noise.
  std::string path;         // Binary loader input.
  double test_fraction = 0.2;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct AttackSpec {
  int pretrain_epochs = 2;
  int train_count = 400;
  int test_count = 100;
  int epochs = 40;
  double learning_rate = 0.05;
  int batch_size = 16;
  int hidden_channels = 4;
  int upsample = 1;
  int group_size = 2;
  int num_seeds = 3;
  std::vector<double> train_fractions = {0.1, 1.0};

  friend bool operator==(const AttackSpec&, const AttackSpec&) = default;
};

struct ExperimentConfig {
  Mode mode = Mode::kDpCutMixSl;
  int num_clients = 10;
  int group_size = 10;
  LambdaSpec lambda;
  bool fedavg_lower = false;
  int epochs = 1;
  int max_rounds = 0;  // 0: no cap beyond epochs.
  double learning_rate = 0.02;
  int batch_size = 4;
  uint64_t seed = 1;
  PrivacyParams privacy;
  ModelConfig model;
  DatasetSpec dataset;
  AttackSpec attack;
  std::string output_dir = "splitmix_out";

  // Throws a config error describing the first invalid field.
  void Validate() const;

  friend bool operator==(const ExperimentConfig& a,
                         const ExperimentConfig& b) {
    return a.mode == b.mode && a.num_clients == b.num_clients &&
           a.group_size == b.group_size && a.lambda.mode == b.lambda.mode &&
           a.lambda.concentration == b.lambda.concentration &&
           a.fedavg_lower == b.fedavg_lower && a.epochs == b.epochs &&
           a.max_rounds == b.max_rounds &&
           a.learning_rate == b.learning_rate &&
           a.batch_size == b.batch_size && a.seed == b.seed &&
           a.privacy == b.privacy && a.model == b.model &&
           a.dataset == b.dataset && a.attack == b.attack &&
           a.output_dir == b.output_dir;
  }
};

// Missing keys keep their defaults; unknown keys and ill-typed values are
// config errors. The result is validated.
ExperimentConfig ParseConfig(const std::string& json_text);
ExperimentConfig LoadConfig(const std::string& path);
// Complete JSON document with every key; ParseConfig(ConfigToJson(c)) == c.
std::string ConfigToJson(const ExperimentConfig& config);

}  // namespace splitmix

#endif  // SPLITMIX_CONFIG_H_
