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

// Messages exchanged between the mixer, the clients and the server, their
// byte-exact encoding, an in-process transport that enforces the per-round
// message order, and the traffic ledger.
//
// Frame layout (little-endian):
//   [kind:1][sender:2][receiver:2][round:4][payload_length:4][payload]
// Clients use their index as role id; the mixer and server use kMixerId and
// kServerId.

#ifndef SPLITMIX_PROTOCOL_H_
#define SPLITMIX_PROTOCOL_H_

#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "splitmix/config.h"
#include "splitmix/mixer.h"
#include "splitmix/rng.h"
#include "splitmix/split_vit.h"
#include "splitmix/tensor.h"

namespace splitmix {

enum class MessageKind : uint8_t {
  kMaskDown = 1,
  kSmashedUp = 2,
  kLabelUp = 3,
  kCutGradDown = 4,
  kLowerWeightsUp = 5,
  kAvgWeightsDown = 6,
};

std::string MessageKindName(MessageKind kind);

inline constexpr uint16_t kMixerId = 0xFFFE;
inline constexpr uint16_t kServerId = 0xFFFF;
inline constexpr size_t kFrameHeaderBytes = 13;

struct RoundMessage {
  MessageKind kind = MessageKind::kMaskDown;
  uint16_t sender = 0;
  uint16_t receiver = 0;
  uint32_t round = 0;
  std::vector<uint8_t> payload;

  friend bool operator==(const RoundMessage&, const RoundMessage&) = default;
};

std::vector<uint8_t> EncodeFrame(const RoundMessage& message);
// Throws a protocol error on a malformed or truncated frame.
RoundMessage DecodeFrame(std::span<const uint8_t> frame);

// Mixer output for one group and one round:
//   [items:4][num_patches:4][group:1] group × ([client:2][λ:8])
//   then, if num_patches > 0, items × num_patches owner bytes.
// Owner byte k of item b is the group slot owning patch k. num_patches is 0
// when no masks are needed (Mixup).
struct MaskDownPayload {
  int num_patches = 0;
  std::vector<int> client_ids;
  std::vector<double> lambdas;
  std::vector<std::vector<uint8_t>> owners;  // One map per batch item.

  int SlotOf(int client_id) const;  // Throws a protocol error if absent.
  PatchMask MaskFor(size_t item, int slot) const;

  friend bool operator==(const MaskDownPayload&, const MaskDownPayload&) = default;
};
std::vector<uint8_t> EncodeMaskDown(const MaskDownPayload& payload);
MaskDownPayload DecodeMaskDown(std::span<const uint8_t> bytes);

// Patch-row blocks (smashed data up, cut-layer gradients down):
//   [items:4] then per item [rows:4][cols:4][k:4] followed by
//   k == rows: rows·cols values (dense), otherwise
//   k × ([row index:2][cols values]).
// Rows outside the given mask are not transmitted and decode as zero.
std::vector<uint8_t> EncodePatchBlocks(std::span<const Tensor> blocks,
                                       std::span<const PatchMask> masks);
struct DecodedBlock {
  Tensor data;            // rows × cols, zero outside `rows_present`.
  std::vector<int> rows_present;
};
std::vector<DecodedBlock> DecodePatchBlocks(std::span<const uint8_t> bytes);
// Payload size of one message carrying `items` blocks with k rows each.
size_t PatchBlocksPayloadBytes(size_t items, size_t rows, size_t cols, size_t k);

// [items:4][dim:4] then items·dim values.
std::vector<uint8_t> EncodeLabels(std::span<const Tensor> labels);
std::vector<Tensor> DecodeLabels(std::span<const uint8_t> bytes);

// Random partition of the clients into groups of size g; when g does not
// divide n the last group holds the remainder.
std::vector<std::vector<int>> FormGroups(SeededRng& rng,
                                         std::span<const int> client_ids,
                                         int group_size);

// Parameterwise mean. Throws a shape error if architectures differ.
LowerSegment FedAvgLower(std::span<const LowerSegment> segments);

// Byte ledger keyed by (round, kind, sender, receiver).
class TrafficLog {
 public:
  struct Entry {
    uint64_t messages = 0;
    uint64_t payload_bytes = 0;
    uint64_t frame_bytes = 0;
  };
  using Key = std::tuple<uint32_t, MessageKind, uint16_t, uint16_t>;

  void Record(const RoundMessage& message);
  void Merge(const TrafficLog& other);

  const std::map<Key, Entry>& entries() const { return entries_; }
  uint64_t TotalPayloadBytes() const;
  uint64_t TotalFrameBytes() const;
  // Client-to-mixer/server traffic is uplink; everything else is downlink.
  // Payload bytes only.
  uint64_t UplinkBytes(uint32_t round) const;
  uint64_t DownlinkBytes(uint32_t round) const;
  // CSV with header round,kind,sender,receiver,messages,payload_bytes,
  // frame_bytes.
  std::string ToCsv() const;

 private:
  std::map<Key, Entry> entries_;
};

bool IsClientId(uint16_t id);

// In-process transport. Messages are framed, decoded and queued per
// receiver; the traffic log records every delivered frame. Within a round
// the order MaskDown -> SmashedUp/LabelUp -> CutGradDown ->
// LowerWeightsUp -> AvgWeightsDown is enforced per client; MaskDown is
// mandatory before uploads only when `masks_required`.
class Transport {
 public:
  explicit Transport(bool masks_required) : masks_required_(masks_required) {}

  void BeginRound(uint32_t round);
  uint32_t round() const { return round_; }

  // Throws a protocol error on an out-of-order or misaddressed message.
  void Send(const RoundMessage& message);
  // Pops the oldest pending message of `kind` addressed to `receiver`.
  // Throws a protocol error if there is none.
  RoundMessage Receive(uint16_t receiver, MessageKind kind);
  size_t Pending() const;

  const TrafficLog& log() const { return log_; }
  // Sum of payload lengths of every frame delivered so far, counted
  // independently of the log.
  uint64_t delivered_payload_bytes() const { return delivered_payload_bytes_; }

 private:
  struct Step {
    bool sent = false;
    bool received = false;
  };
  struct ClientPhase {
    Step mask, smashed, label, grad, weights_up, weights_down;
  };

  ClientPhase& Phase(uint16_t client);

  bool masks_required_;
  uint32_t round_ = 0;
  std::map<uint16_t, ClientPhase> phases_;
  std::map<uint16_t, std::deque<std::vector<uint8_t>>> queues_;
  TrafficLog log_;
  uint64_t delivered_payload_bytes_ = 0;
};

struct CommReport {
  // Mean SmashedUp payload bytes per client per round.
  double mean_uplink_payload = 0.0;
  // The same message with every patch sent densely.
  double dense_payload = 0.0;
  double reduction_factor = 1.0;
  // Per client: mean SmashedUp payload bytes per round.
  std::map<int, double> per_client;
};

// Smashed-data uplink accounting against a dense upload of
// batch_size × N × d values per client and round.
CommReport ComputeCommReport(const TrafficLog& log,
                             const ExperimentConfig& config);

}  // namespace splitmix

#endif  // SPLITMIX_PROTOCOL_H_
