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

#include "splitmix/protocol.h"

#include <algorithm>
#include <sstream>

#include "splitmix/bytes.h"
#include "splitmix/error.h"

namespace splitmix {
namespace {

std::string RoleName(uint16_t id) {
  if (id == kMixerId) return "mixer";
  if (id == kServerId) return "server";
  return "client" + std::to_string(id);
}

std::string Describe(const RoundMessage& m) {
  return MessageKindName(m.kind) + " " + RoleName(m.sender) + "->" +
         RoleName(m.receiver) + " (round " + std::to_string(m.round) + ")";
}

void CheckCount(uint32_t count, size_t remaining, size_t min_bytes_each,
                const char* what) {
  if (min_bytes_each > 0 && count > remaining / min_bytes_each) {
    ThrowProtocol(std::string(what) + ": item count exceeds payload size");
  }
}

}  // namespace

std::string MessageKindName(MessageKind kind) {
  switch (kind) {
    case MessageKind::kMaskDown:
      return "MaskDown";
    case MessageKind::kSmashedUp:
      return "SmashedUp";
    case MessageKind::kLabelUp:
      return "LabelUp";
    case MessageKind::kCutGradDown:
      return "CutGradDown";
    case MessageKind::kLowerWeightsUp:
      return "LowerWeightsUp";
    case MessageKind::kAvgWeightsDown:
      return "AvgWeightsDown";
  }
  return "Unknown";
}

bool IsClientId(uint16_t id) { return id != kMixerId && id != kServerId; }

std::vector<uint8_t> EncodeFrame(const RoundMessage& m) {
  if (m.payload.size() > UINT32_MAX) ThrowProtocol("payload too large to frame");
  ByteWriter w;
  w.U8(static_cast<uint8_t>(m.kind));
  w.U16(m.sender);
  w.U16(m.receiver);
  w.U32(m.round);
  w.U32(static_cast<uint32_t>(m.payload.size()));
  w.Bytes(m.payload);
  return w.Take();
}

RoundMessage DecodeFrame(std::span<const uint8_t> frame) {
  ByteReader r(frame);
  RoundMessage m;
  const uint8_t kind = r.U8();
  if (kind < 1 || kind > 6) ThrowProtocol("unknown message kind " + std::to_string(kind));
  m.kind = static_cast<MessageKind>(kind);
  m.sender = r.U16();
  m.receiver = r.U16();
  m.round = r.U32();
  const uint32_t length = r.U32();
  auto body = r.Bytes(length);
  m.payload.assign(body.begin(), body.end());
  if (!r.done()) ThrowProtocol("trailing bytes after frame payload");
  return m;
}

int MaskDownPayload::SlotOf(int client_id) const {
  auto it = std::find(client_ids.begin(), client_ids.end(), client_id);
  if (it == client_ids.end()) {
    ThrowProtocol("client " + std::to_string(client_id) + " is not in this group");
  }
  return static_cast<int>(it - client_ids.begin());
}

PatchMask MaskDownPayload::MaskFor(size_t item, int slot) const {
  PatchMask mask;
  mask.client_id = client_ids.at(slot);
  mask.num_patches = num_patches;
  const auto& map = owners.at(item);
  for (int k = 0; k < num_patches; ++k) {
    if (map[k] == slot) mask.selected.push_back(k);
  }
  return mask;
}

std::vector<uint8_t> EncodeMaskDown(const MaskDownPayload& p) {
  if (p.client_ids.size() != p.lambdas.size() || p.client_ids.empty() ||
      p.client_ids.size() > 255) {
    ThrowProtocol("MaskDown: group must have 1..255 members with one lambda each");
  }
  ByteWriter w;
  w.U32(static_cast<uint32_t>(p.owners.size()));
  w.U32(static_cast<uint32_t>(p.num_patches));
  w.U8(static_cast<uint8_t>(p.client_ids.size()));
  for (size_t i = 0; i < p.client_ids.size(); ++i) {
    w.U16(static_cast<uint16_t>(p.client_ids[i]));
    w.F64(p.lambdas[i]);
  }
  for (const auto& map : p.owners) {
    if (map.size() != static_cast<size_t>(p.num_patches)) {
      ThrowProtocol("MaskDown: owner map length differs from num_patches");
    }
    w.Bytes(map);
  }
  return w.Take();
}

MaskDownPayload DecodeMaskDown(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  MaskDownPayload p;
  const uint32_t items = r.U32();
  p.num_patches = static_cast<int>(r.U32());
  const int group = r.U8();
  if (group == 0) ThrowProtocol("MaskDown: empty group");
  for (int i = 0; i < group; ++i) {
    p.client_ids.push_back(r.U16());
    p.lambdas.push_back(r.F64());
  }
  if (p.num_patches > 0) {
    CheckCount(items, r.remaining(), p.num_patches, "MaskDown");
    for (uint32_t b = 0; b < items; ++b) {
      auto map = r.Bytes(p.num_patches);
      for (uint8_t owner : map) {
        if (owner >= group) ThrowProtocol("MaskDown: owner slot out of range");
      }
      p.owners.emplace_back(map.begin(), map.end());
    }
  } else {
    p.owners.resize(items);
  }
  if (!r.done()) ThrowProtocol("MaskDown: trailing bytes");
  return p;
}

size_t PatchBlocksPayloadBytes(size_t items, size_t rows, size_t cols, size_t k) {
  const size_t per_row = cols * 8 + (k == rows ? 0 : 2);
  return 4 + items * (12 + k * per_row);
}

std::vector<uint8_t> EncodePatchBlocks(std::span<const Tensor> blocks,
                                       std::span<const PatchMask> masks) {
  if (blocks.size() != masks.size()) {
    ThrowProtocol("EncodePatchBlocks: one mask per block required");
  }
  ByteWriter w;
  w.U32(static_cast<uint32_t>(blocks.size()));
  for (size_t i = 0; i < blocks.size(); ++i) {
    const Tensor& t = blocks[i];
    const PatchMask& mask = masks[i];
    if (t.rank() != 2 || t.rows() != static_cast<size_t>(mask.num_patches)) {
      ThrowShape("EncodePatchBlocks: block " + t.ShapeString() +
                 " does not match mask over " + std::to_string(mask.num_patches) +
                 " patches");
    }
    if (t.rows() > 0xFFFF) ThrowShape("EncodePatchBlocks: too many rows");
    const size_t k = mask.selected.size();
    w.U32(static_cast<uint32_t>(t.rows()));
    w.U32(static_cast<uint32_t>(t.cols()));
    w.U32(static_cast<uint32_t>(k));
    if (k == t.rows()) {
      for (double v : t.data()) w.F64(v);
    } else {
      for (int p : mask.selected) {
        w.U16(static_cast<uint16_t>(p));
        for (double v : t.row(p)) w.F64(v);
      }
    }
  }
  return w.Take();
}

std::vector<DecodedBlock> DecodePatchBlocks(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  const uint32_t items = r.U32();
  CheckCount(items, r.remaining(), 12, "patch blocks");
  std::vector<DecodedBlock> out;
  for (uint32_t i = 0; i < items; ++i) {
    const uint32_t rows = r.U32();
    const uint32_t cols = r.U32();
    const uint32_t k = r.U32();
    if (k > rows) ThrowProtocol("patch blocks: more rows sent than exist");
    const size_t row_bytes = static_cast<size_t>(cols) * 8 + (k == rows ? 0 : 2);
    CheckCount(k, r.remaining(), row_bytes, "patch blocks");
    DecodedBlock block;
    block.data = Tensor::Matrix(rows, cols);
    if (k == rows) {
      for (double& v : block.data.data()) v = r.F64();
      block.rows_present.resize(rows);
      for (uint32_t p = 0; p < rows; ++p) block.rows_present[p] = static_cast<int>(p);
    } else {
      int previous = -1;
      for (uint32_t j = 0; j < k; ++j) {
        const int p = r.U16();
        if (p >= static_cast<int>(rows) || p <= previous) {
          ThrowProtocol("patch blocks: row indices must be increasing and in range");
        }
        previous = p;
        block.rows_present.push_back(p);
        for (double& v : block.data.row(p)) v = r.F64();
      }
    }
    out.push_back(std::move(block));
  }
  if (!r.done()) ThrowProtocol("patch blocks: trailing bytes");
  return out;
}

std::vector<uint8_t> EncodeLabels(std::span<const Tensor> labels) {
  ByteWriter w;
  w.U32(static_cast<uint32_t>(labels.size()));
  const size_t dim = labels.empty() ? 0 : labels.front().size();
  w.U32(static_cast<uint32_t>(dim));
  for (const Tensor& y : labels) {
    if (y.size() != dim) ThrowShape("EncodeLabels: label dimensions differ");
    for (double v : y.data()) w.F64(v);
  }
  return w.Take();
}

std::vector<Tensor> DecodeLabels(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  const uint32_t items = r.U32();
  const uint32_t dim = r.U32();
  if (static_cast<uint64_t>(items) * dim * 8 != r.remaining()) {
    ThrowProtocol("LabelUp: payload size does not match items x dim");
  }
  std::vector<Tensor> out;
  for (uint32_t i = 0; i < items; ++i) {
    Tensor y({dim});
    for (double& v : y.data()) v = r.F64();
    out.push_back(std::move(y));
  }
  return out;
}

std::vector<std::vector<int>> FormGroups(SeededRng& rng,
                                         std::span<const int> client_ids,
                                         int group_size) {
  if (group_size < 1) ThrowParameter("FormGroups: group size must be >= 1");
  if (static_cast<size_t>(group_size) > client_ids.size()) {
    ThrowParameter("FormGroups: group size " + std::to_string(group_size) +
                   " exceeds client count " + std::to_string(client_ids.size()));
  }
  std::vector<int> order(client_ids.begin(), client_ids.end());
  rng.Shuffle(std::span<int>(order));
  std::vector<std::vector<int>> groups;
  for (size_t start = 0; start < order.size(); start += group_size) {
    const size_t end = std::min(order.size(), start + group_size);
    groups.emplace_back(order.begin() + start, order.begin() + end);
  }
  return groups;
}

LowerSegment FedAvgLower(std::span<const LowerSegment> segments) {
  if (segments.empty()) ThrowParameter("FedAvgLower: no segments");
  LowerSegment avg = ZerosLike(segments.front());
  std::vector<Tensor*> dst;
  ForEachParam(avg, [&](const std::string&, Tensor& t) { dst.push_back(&t); });
  for (const LowerSegment& seg : segments) {
    if (seg.patch_size != avg.patch_size || seg.channels != avg.channels) {
      ThrowShape("FedAvgLower: architecture mismatch");
    }
    size_t i = 0;
    ForEachParam(seg, [&](const std::string& name, const Tensor& t) {
      if (!t.SameShape(*dst[i])) ThrowShape("FedAvgLower: shape mismatch in " + name);
      AddInPlace(*dst[i], t);
      ++i;
    });
  }
  const double scale = 1.0 / static_cast<double>(segments.size());
  for (Tensor* t : dst) ScaleInPlace(*t, scale);
  return avg;
}

void TrafficLog::Record(const RoundMessage& m) {
  Entry& e = entries_[Key{m.round, m.kind, m.sender, m.receiver}];
  e.messages += 1;
  e.payload_bytes += m.payload.size();
  e.frame_bytes += m.payload.size() + kFrameHeaderBytes;
}

void TrafficLog::Merge(const TrafficLog& other) {
  for (const auto& [key, entry] : other.entries_) {
    Entry& e = entries_[key];
    e.messages += entry.messages;
    e.payload_bytes += entry.payload_bytes;
    e.frame_bytes += entry.frame_bytes;
  }
}

uint64_t TrafficLog::TotalPayloadBytes() const {
  uint64_t total = 0;
  for (const auto& [key, e] : entries_) total += e.payload_bytes;
  return total;
}

uint64_t TrafficLog::TotalFrameBytes() const {
  uint64_t total = 0;
  for (const auto& [key, e] : entries_) total += e.frame_bytes;
  return total;
}

uint64_t TrafficLog::UplinkBytes(uint32_t round) const {
  uint64_t total = 0;
  for (const auto& [key, e] : entries_) {
    if (std::get<0>(key) == round && IsClientId(std::get<2>(key))) {
      total += e.payload_bytes;
    }
  }
  return total;
}

uint64_t TrafficLog::DownlinkBytes(uint32_t round) const {
  uint64_t total = 0;
  for (const auto& [key, e] : entries_) {
    if (std::get<0>(key) == round && !IsClientId(std::get<2>(key))) {
      total += e.payload_bytes;
    }
  }
  return total;
}

std::string TrafficLog::ToCsv() const {
  std::ostringstream out;
  out << "round,kind,sender,receiver,messages,payload_bytes,frame_bytes\n";
  for (const auto& [key, e] : entries_) {
    out << std::get<0>(key) << ',' << MessageKindName(std::get<1>(key)) << ','
        << RoleName(std::get<2>(key)) << ',' << RoleName(std::get<3>(key)) << ','
        << e.messages << ',' << e.payload_bytes << ',' << e.frame_bytes << '\n';
  }
  return out.str();
}

void Transport::BeginRound(uint32_t round) {
  if (Pending() != 0) {
    ThrowProtocol("round " + std::to_string(round_) + " ended with " +
                  std::to_string(Pending()) + " undelivered messages");
  }
  round_ = round;
  phases_.clear();
}

Transport::ClientPhase& Transport::Phase(uint16_t client) {
  return phases_[client];
}

size_t Transport::Pending() const {
  size_t n = 0;
  for (const auto& [id, q] : queues_) n += q.size();
  return n;
}

void Transport::Send(const RoundMessage& m) {
  auto violation = [&](const std::string& why) {
    ThrowProtocol("order violation: " + Describe(m) + ": " + why);
  };
  if (m.round != round_) violation("message is not for the current round");
  const bool from_client = IsClientId(m.sender);
  const bool to_client = IsClientId(m.receiver);
  switch (m.kind) {
    case MessageKind::kMaskDown: {
      if (m.sender != kMixerId) violation("masks come from the mixer");
      if (to_client) {
        ClientPhase& p = Phase(m.receiver);
        if (p.mask.sent) violation("mask already sent this round");
        if (p.smashed.sent || p.label.sent) violation("client already uploaded");
        p.mask.sent = true;
      } else if (m.receiver != kServerId) {
        violation("bad receiver");
      }
      break;
    }
    case MessageKind::kSmashedUp:
    case MessageKind::kLabelUp: {
      if (!from_client || m.receiver != kServerId) {
        violation("uploads go from a client to the server");
      }
      ClientPhase& p = Phase(m.sender);
      if (masks_required_ && !p.mask.received) violation("upload before mask receipt");
      Step& s = m.kind == MessageKind::kSmashedUp ? p.smashed : p.label;
      if (s.sent) violation("duplicate upload");
      if (p.grad.sent) violation("upload after gradient");
      s.sent = true;
      break;
    }
    case MessageKind::kCutGradDown: {
      if (m.sender != kServerId || !to_client) {
        violation("gradients go from the server to a client");
      }
      ClientPhase& p = Phase(m.receiver);
      if (!p.smashed.received || !p.label.received) {
        violation("gradient before the client's uploads were received");
      }
      if (p.grad.sent) violation("duplicate gradient");
      p.grad.sent = true;
      break;
    }
    case MessageKind::kLowerWeightsUp: {
      if (!from_client || m.receiver != kServerId) violation("bad direction");
      ClientPhase& p = Phase(m.sender);
      if (!p.grad.received) violation("weights before gradient receipt");
      if (p.weights_up.sent) violation("duplicate weights");
      p.weights_up.sent = true;
      break;
    }
    case MessageKind::kAvgWeightsDown: {
      if (m.sender != kServerId || !to_client) violation("bad direction");
      ClientPhase& p = Phase(m.receiver);
      if (!p.weights_up.received) violation("average before the client's weights");
      if (p.weights_down.sent) violation("duplicate average");
      p.weights_down.sent = true;
      break;
    }
  }
  std::vector<uint8_t> frame = EncodeFrame(m);
  log_.Record(m);
  queues_[m.receiver].push_back(std::move(frame));
}

RoundMessage Transport::Receive(uint16_t receiver, MessageKind kind) {
  auto& queue = queues_[receiver];
  for (auto it = queue.begin(); it != queue.end(); ++it) {
    if (static_cast<MessageKind>((*it)[0]) != kind) continue;
    RoundMessage m = DecodeFrame(*it);
    queue.erase(it);
    delivered_payload_bytes_ += m.payload.size();
    switch (kind) {
      case MessageKind::kMaskDown:
        if (IsClientId(receiver)) Phase(receiver).mask.received = true;
        break;
      case MessageKind::kSmashedUp:
        Phase(m.sender).smashed.received = true;
        break;
      case MessageKind::kLabelUp:
        Phase(m.sender).label.received = true;
        break;
      case MessageKind::kCutGradDown:
        Phase(receiver).grad.received = true;
        break;
      case MessageKind::kLowerWeightsUp:
        Phase(m.sender).weights_up.received = true;
        break;
      case MessageKind::kAvgWeightsDown:
        Phase(receiver).weights_down.received = true;
        break;
    }
    return m;
  }
  ThrowProtocol("no pending " + MessageKindName(kind) + " for " +
                RoleName(receiver));
}

CommReport ComputeCommReport(const TrafficLog& log,
                             const ExperimentConfig& config) {
  std::map<int, std::pair<uint64_t, uint64_t>> totals;  // bytes, messages
  for (const auto& [key, e] : log.entries()) {
    if (std::get<1>(key) != MessageKind::kSmashedUp) continue;
    auto& t = totals[std::get<2>(key)];
    t.first += e.payload_bytes;
    t.second += e.messages;
  }
  CommReport report;
  const size_t n = config.model.num_patches();
  report.dense_payload = static_cast<double>(
      PatchBlocksPayloadBytes(config.batch_size, n, config.model.embed_dim, n));
  if (totals.empty()) return report;
  double sum = 0.0;
  for (const auto& [client, t] : totals) {
    const double mean = static_cast<double>(t.first) / static_cast<double>(t.second);
    report.per_client[client] = mean;
    sum += mean;
  }
  report.mean_uplink_payload = sum / static_cast<double>(totals.size());
  report.reduction_factor = report.dense_payload / report.mean_uplink_payload;
  return report;
}

}  // namespace splitmix
