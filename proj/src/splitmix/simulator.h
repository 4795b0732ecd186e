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

// Round-by-round training: every round each client takes a batch, the mixer
// (if the mode has one) forms groups and sends ratios and masks, clients
// upload their (noisy, masked) smashed data and labels, the server mixes,
// runs the upper segment and returns cut-layer gradients, and everyone takes
// one SGD step. Standalone modes train each client's full model locally and
// send nothing.

#ifndef SPLITMIX_SIMULATOR_H_
#define SPLITMIX_SIMULATOR_H_

#include <cstdint>
#include <map>
#include <vector>

#include "splitmix/config.h"
#include "splitmix/dataset.h"
#include "splitmix/interpolation.h"
#include "splitmix/protocol.h"
#include "splitmix/rng.h"
#include "splitmix/split_vit.h"

namespace splitmix {

// Seeded-stream ids. Client streams are offset by the client index.
inline constexpr uint64_t kLowerInitStream = 1;
inline constexpr uint64_t kUpperInitStream = 2;
inline constexpr uint64_t kMixerStream = 4;
inline constexpr uint64_t kClientDataStreamBase = 100;
inline constexpr uint64_t kClientNoiseStreamBase = 1000;

struct TrainState {
  double learning_rate = 0.0;
  uint64_t step = 0;
  std::vector<LowerSegment> lowers;  // One per client.
  // One shared segment, or one per client in standalone modes.
  std::vector<UpperSegment> uppers;
};

struct RoundMetrics {
  uint32_t round = 0;
  double train_loss = 0.0;  // Mean per-item loss over all groups.
  double max_lambda = 1.0;  // Largest mixing ratio used this round.
  int num_groups = 0;
  uint64_t uplink_bytes = 0;
  uint64_t downlink_bytes = 0;
};

// What crossed the cut layer in the most recent round.
struct RoundTrace {
  // Clamped, noise-free smashed data per client and batch item.
  std::map<int, std::vector<Tensor>> clamped;
  // Server inputs (the mixed items), in group order.
  std::vector<MixedBatchItem> server_items;
  std::vector<std::vector<int>> groups;
};

class Simulator {
 public:
  explicit Simulator(const ExperimentConfig& config);
  Simulator(const ExperimentConfig& config, DataSplit data);

  RoundMetrics RunRound();
  // Accuracy of each client's model on its test shard (test sample i
  // belongs to client i mod n), pooled over clients.
  double Evaluate() const;

  int rounds_per_epoch() const { return rounds_per_epoch_; }
  int total_rounds() const { return total_rounds_; }
  uint32_t rounds_done() const { return round_; }

  const ExperimentConfig& config() const { return config_; }
  const TrainState& state() const { return state_; }
  const Transport& transport() const { return transport_; }
  const RoundTrace& last_trace() const { return trace_; }
  const DataSplit& data() const { return data_; }

 private:
  std::vector<int> NextBatch(int client);
  const UpperSegment& UpperFor(int client) const;
  RoundMetrics RunServerRound();
  RoundMetrics RunStandaloneRound();

  ExperimentConfig config_;
  DataSplit data_;
  TrainState state_;
  Transport transport_;
  RoundTrace trace_;
  SeededRng mixer_rng_;
  std::vector<SeededRng> data_rngs_;
  std::vector<SeededRng> noise_rngs_;
  std::vector<std::vector<int>> shards_;
  std::vector<std::vector<int>> order_;
  std::vector<size_t> cursor_;
  int rounds_per_epoch_ = 0;
  int total_rounds_ = 0;
  uint32_t round_ = 0;
};

}  // namespace splitmix

#endif  // SPLITMIX_SIMULATOR_H_
