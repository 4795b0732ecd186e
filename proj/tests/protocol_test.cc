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
#include <cstring>
#include <functional>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "splitmix/error.h"

namespace splitmix {
namespace {

void ExpectProtocolError(const std::function<void()>& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected a protocol error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kProtocol) << e.what();
  }
}

TEST(FrameTest, HeaderLayoutIsLittleEndian) {
  RoundMessage m{MessageKind::kSmashedUp, 3, kServerId, 0x01020304, {9, 8}};
  const std::vector<uint8_t> f = EncodeFrame(m);
  const std::vector<uint8_t> expected = {2,    3,    0,    0xFF, 0xFF, 4, 3,
                                         2,    1,    2,    0,    0,    0, 9, 8};
  EXPECT_EQ(f, expected);
  EXPECT_EQ(DecodeFrame(f), m);
}

TEST(FrameTest, TruncatedOrOversizedFramesAreRejected) {
  RoundMessage m{MessageKind::kLabelUp, 1, kServerId, 7, {1, 2, 3, 4}};
  const std::vector<uint8_t> f = EncodeFrame(m);
  for (size_t cut = 0; cut < f.size(); ++cut) {
    std::vector<uint8_t> t(f.begin(), f.begin() + cut);
    ExpectProtocolError([&] { DecodeFrame(t); });
  }
  std::vector<uint8_t> longer = f;
  longer.push_back(0);
  ExpectProtocolError([&] { DecodeFrame(longer); });
  std::vector<uint8_t> bad_kind = f;
  bad_kind[0] = 42;
  ExpectProtocolError([&] { DecodeFrame(bad_kind); });
}

TEST(MaskDownTest, RoundTripAndSlots) {
  MaskDownPayload p;
  p.num_patches = 4;
  p.client_ids = {5, 2};
  p.lambdas = {0.25, 0.75};
  p.owners = {{0, 1, 1, 1}, {1, 0, 1, 1}};
  const std::vector<uint8_t> bytes = EncodeMaskDown(p);
  // 9-byte header, 10 bytes per group member, one owner byte per patch.
  EXPECT_EQ(bytes.size(), 9u + 2 * 10 + 2 * 4);
  const MaskDownPayload q = DecodeMaskDown(bytes);
  EXPECT_EQ(q, p);
  EXPECT_EQ(q.SlotOf(2), 1);
  ExpectProtocolError([&] { q.SlotOf(7); });
  const PatchMask m = q.MaskFor(1, 1);
  EXPECT_EQ(m.client_id, 2);
  EXPECT_EQ(m.selected, (std::vector<int>{0, 2, 3}));
}

TEST(MaskDownTest, MixupPayloadCarriesNoOwners) {
  MaskDownPayload p;
  p.client_ids = {0, 1, 2};
  p.lambdas = {0.2, 0.3, 0.5};
  const std::vector<uint8_t> bytes = EncodeMaskDown(p);
  EXPECT_EQ(bytes.size(), 9u + 3 * 10);
  EXPECT_EQ(DecodeMaskDown(bytes), p);
}

// Independent size formula for a patch-block message.
size_t OracleBlockBytes(size_t items, size_t rows, size_t cols, size_t k) {
  const size_t body = k == rows ? rows * cols * 8 : k * (2 + cols * 8);
  return 4 + items * (12 + body);
}

TEST(PatchBlocksTest, PayloadSizeFormula) {
  for (size_t k : {0u, 1u, 7u, 63u, 64u}) {
    EXPECT_EQ(PatchBlocksPayloadBytes(4, 64, 32, k),
              OracleBlockBytes(4, 64, 32, k));
  }
}

TEST(PatchBlocksTest, SparseRoundTripZeroesMissingRows) {
  SeededRng rng(1, 0);
  std::vector<Tensor> blocks;
  std::vector<PatchMask> masks;
  for (int b = 0; b < 3; ++b) {
    Tensor t = Tensor::Matrix(6, 3);
    for (double& v : t.data()) v = rng.NextGaussian();
    blocks.push_back(t);
  }
  masks.push_back(PatchMask{0, 6, {1, 4}});
  masks.push_back(PatchMask::Full(0, 6));
  masks.push_back(PatchMask::Empty(0, 6));
  const std::vector<uint8_t> bytes = EncodePatchBlocks(blocks, masks);
  EXPECT_EQ(bytes.size(), 4u + (12 + 2 * (2 + 24)) + (12 + 6 * 24) + 12);
  const std::vector<DecodedBlock> out = DecodePatchBlocks(bytes);
  ASSERT_EQ(out.size(), 3u);
  for (size_t b = 0; b < 3; ++b) {
    EXPECT_EQ(out[b].rows_present, masks[b].selected);
    for (size_t r = 0; r < 6; ++r) {
      const bool kept = masks[b].Contains(static_cast<int>(r));
      for (size_t c = 0; c < 3; ++c) {
        EXPECT_EQ(out[b].data(r, c), kept ? blocks[b](r, c) : 0.0);
      }
    }
  }
  std::vector<uint8_t> truncated(bytes.begin(), bytes.end() - 1);
  ExpectProtocolError([&] { DecodePatchBlocks(truncated); });
}

TEST(LabelsTest, RoundTrip) {
  const std::vector<Tensor> labels = {Tensor::Vector({0.1, -0.2, 1.5}),
                                      Tensor::Vector({0, 0, 1})};
  const std::vector<uint8_t> bytes = EncodeLabels(labels);
  EXPECT_EQ(bytes.size(), 8u + 6 * 8);
  const std::vector<Tensor> out = DecodeLabels(bytes);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0], labels[0]);
  EXPECT_EQ(out[1], labels[1]);
}

TEST(FormGroupsTest, PartitionWithRemainder) {
  SeededRng rng(4, 0);
  const std::vector<int> ids = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  const auto groups = FormGroups(rng, ids, 4);
  ASSERT_EQ(groups.size(), 3u);
  EXPECT_EQ(groups[0].size(), 4u);
  EXPECT_EQ(groups[1].size(), 4u);
  EXPECT_EQ(groups[2].size(), 2u);
  std::multiset<int> seen;
  for (const auto& g : groups) seen.insert(g.begin(), g.end());
  EXPECT_EQ(seen, std::multiset<int>(ids.begin(), ids.end()));
  EXPECT_THROW(FormGroups(rng, ids, 0), Error);
}

TEST(FedAvgTest, ParameterwiseMean) {
  ModelConfig config;
  SeededRng r1(1, 1), r2(2, 1);
  const std::vector<LowerSegment> segs = {InitLowerSegment(config, r1),
                                          InitLowerSegment(config, r2)};
  const LowerSegment avg = FedAvgLower(segs);
  for (size_t i = 0; i < avg.embed.weight.size(); ++i) {
    EXPECT_DOUBLE_EQ(avg.embed.weight[i],
                     (segs[0].embed.weight[i] + segs[1].embed.weight[i]) / 2);
  }
  ModelConfig other = config;
  other.embed_dim = 16;
  other.num_heads = 2;
  SeededRng r3(3, 1);
  const std::vector<LowerSegment> mixed = {segs[0], InitLowerSegment(other, r3)};
  EXPECT_THROW(FedAvgLower(mixed), Error);
}

// Drives one full round for a single client through the transport.
void FullRound(Transport& t, uint32_t round, uint16_t client) {
  t.BeginRound(round);
  t.Send({MessageKind::kMaskDown, kMixerId, client, round, {1}});
  t.Receive(client, MessageKind::kMaskDown);
  t.Send({MessageKind::kSmashedUp, client, kServerId, round, {1, 2, 3}});
  t.Send({MessageKind::kLabelUp, client, kServerId, round, {4, 5}});
  t.Receive(kServerId, MessageKind::kSmashedUp);
  t.Receive(kServerId, MessageKind::kLabelUp);
  t.Send({MessageKind::kCutGradDown, kServerId, client, round, {6, 7, 8, 9}});
  t.Receive(client, MessageKind::kCutGradDown);
}

TEST(TransportTest, InOrderRoundAndAccounting) {
  Transport t(/*masks_required=*/true);
  FullRound(t, 1, 0);
  FullRound(t, 2, 0);
  EXPECT_EQ(t.Pending(), 0u);
  EXPECT_EQ(t.log().UplinkBytes(1), 5u);
  EXPECT_EQ(t.log().DownlinkBytes(1), 5u);
  EXPECT_EQ(t.log().TotalPayloadBytes(), 20u);
  EXPECT_EQ(t.log().TotalFrameBytes(), 20u + 8 * kFrameHeaderBytes);
  EXPECT_EQ(t.delivered_payload_bytes(), t.log().TotalPayloadBytes());
}

TEST(TransportTest, OrderViolations) {
  {
    Transport t(true);
    t.BeginRound(1);
    ExpectProtocolError(
        [&] { t.Send({MessageKind::kSmashedUp, 0, kServerId, 1, {}}); });
  }
  {
    Transport t(false);
    t.BeginRound(1);
    t.Send({MessageKind::kSmashedUp, 0, kServerId, 1, {}});
    ExpectProtocolError(
        [&] { t.Send({MessageKind::kSmashedUp, 0, kServerId, 1, {}}); });
    ExpectProtocolError(
        [&] { t.Send({MessageKind::kCutGradDown, kServerId, 0, 1, {}}); });
    ExpectProtocolError(
        [&] { t.Send({MessageKind::kLabelUp, 0, kServerId, 2, {}}); });
    ExpectProtocolError(
        [&] { t.Send({MessageKind::kLowerWeightsUp, 0, kServerId, 1, {}}); });
    ExpectProtocolError([&] { t.Receive(3, MessageKind::kCutGradDown); });
  }
}

TEST(TrafficLogTest, CsvHeader) {
  Transport t(true);
  FullRound(t, 1, 2);
  const std::string csv = t.log().ToCsv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "round,kind,sender,receiver,messages,payload_bytes,frame_bytes");
}

TEST(CommReportTest, ReductionAgainstDenseUpload) {
  ExperimentConfig config;
  config.batch_size = 2;
  const size_t n = config.model.num_patches();
  const size_t d = config.model.embed_dim;
  TrafficLog log;
  for (uint16_t c = 0; c < 2; ++c) {
    const size_t k = c == 0 ? 2 : 1;
    RoundMessage m{MessageKind::kSmashedUp, c, kServerId, 1,
                   std::vector<uint8_t>(PatchBlocksPayloadBytes(2, n, d, k))};
    log.Record(m);
  }
  const CommReport r = ComputeCommReport(log, config);
  const double dense = static_cast<double>(OracleBlockBytes(2, n, d, n));
  const double mean = (OracleBlockBytes(2, n, d, 2) + OracleBlockBytes(2, n, d, 1)) / 2.0;
  EXPECT_EQ(r.dense_payload, dense);
  EXPECT_EQ(r.mean_uplink_payload, mean);
  EXPECT_DOUBLE_EQ(r.reduction_factor, dense / mean);
}

}  // namespace
}  // namespace splitmix
