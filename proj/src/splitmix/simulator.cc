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

#include "splitmix/simulator.h"

#include <algorithm>
#include <numeric>

#include "splitmix/dp_mechanism.h"
#include "splitmix/error.h"
#include "splitmix/mixer.h"

namespace splitmix {
namespace {

struct ClientBatch {
  std::vector<int> indices;
  std::vector<LowerCache> caches;
  std::vector<Tensor> pre_clamp;
  std::vector<Tensor> clamped;
};

MixKind KindFor(Mode mode) {
  switch (mode) {
    case Mode::kDpMixSl:
      return MixKind::kMixup;
    case Mode::kDpCutMixSl:
      return MixKind::kPatchCutMix;
    case Mode::kVanillaCutMix:
      return MixKind::kBoxCutMix;
    default:
      return MixKind::kNone;
  }
}

std::vector<PatchMask> FullMasks(int client, int num_patches, size_t count) {
  return std::vector<PatchMask>(count, PatchMask::Full(client, num_patches));
}

}  // namespace

Simulator::Simulator(const ExperimentConfig& config)
    : Simulator(config, MakeDataSplit(config)) {}

Simulator::Simulator(const ExperimentConfig& config, DataSplit data)
    : config_(config),
      data_(std::move(data)),
      transport_(ModeUsesMixer(config.mode)),
      mixer_rng_(config.seed, kMixerStream) {
  config_.Validate();
  const int n = config_.num_clients;
  if (data_.train.size() < static_cast<size_t>(n)) {
    ThrowConfig("fewer training samples than clients");
  }
  state_.learning_rate = config_.learning_rate;
  SeededRng lower_rng(config_.seed, kLowerInitStream);
  const LowerSegment lower = InitLowerSegment(config_.model, lower_rng);
  state_.lowers.assign(n, lower);
  SeededRng upper_rng(config_.seed, kUpperInitStream);
  const UpperSegment upper = InitUpperSegment(config_.model, upper_rng);
  state_.uppers.assign(ModeUsesServer(config_.mode) ? 1 : n, upper);

  shards_.resize(n);
  for (size_t i = 0; i < data_.train.size(); ++i) shards_[i % n].push_back(static_cast<int>(i));
  size_t largest = 0;
  for (int c = 0; c < n; ++c) {
    data_rngs_.emplace_back(config_.seed, kClientDataStreamBase + c);
    noise_rngs_.emplace_back(config_.seed, kClientNoiseStreamBase + c);
    largest = std::max(largest, shards_[c].size());
  }
  order_.resize(n);
  cursor_.assign(n, 0);
  rounds_per_epoch_ = static_cast<int>(
      (largest + config_.batch_size - 1) / config_.batch_size);
  total_rounds_ = config_.epochs * rounds_per_epoch_;
  if (config_.max_rounds > 0) total_rounds_ = std::min(total_rounds_, config_.max_rounds);
}

std::vector<int> Simulator::NextBatch(int client) {
  std::vector<int> batch;
  for (int b = 0; b < config_.batch_size; ++b) {
    if (cursor_[client] == order_[client].size()) {
      order_[client] = shards_[client];
      data_rngs_[client].Shuffle(std::span<int>(order_[client]));
      cursor_[client] = 0;
    }
    batch.push_back(order_[client][cursor_[client]++]);
  }
  return batch;
}

const UpperSegment& Simulator::UpperFor(int client) const {
  return state_.uppers.size() == 1 ? state_.uppers.front()
                                   : state_.uppers.at(client);
}

RoundMetrics Simulator::RunRound() {
  ++round_;
  ++state_.step;
  return ModeUsesServer(config_.mode) ? RunServerRound() : RunStandaloneRound();
}

RoundMetrics Simulator::RunServerRound() {
  const ExperimentConfig& cfg = config_;
  const int n = cfg.num_clients;
  const int num_patches = cfg.model.num_patches();
  const size_t batch = cfg.batch_size;
  const double delta = cfg.privacy.delta_bound;
  const bool noisy = ModeAddsNoise(cfg.mode);
  const double sigma_s = noisy ? cfg.privacy.sigma_s : 0.0;
  const double sigma_y = noisy ? cfg.privacy.sigma_y : 0.0;
  const bool use_mixer = ModeUsesMixer(cfg.mode);
  const MixKind kind = KindFor(cfg.mode);

  transport_.BeginRound(round_);
  trace_ = RoundTrace{};

  // Clients: lower-segment forward and clamping.
  std::vector<ClientBatch> clients(n);
  for (int c = 0; c < n; ++c) {
    ClientBatch& cb = clients[c];
    cb.indices = NextBatch(c);
    cb.caches.resize(batch);
    for (size_t b = 0; b < batch; ++b) {
      cb.pre_clamp.push_back(LowerForward(state_.lowers[c],
                                          data_.train.images[cb.indices[b]],
                                          &cb.caches[b]));
      cb.clamped.push_back(ClampSmashed(cb.pre_clamp.back(), delta));
    }
    trace_.clamped[c] = cb.clamped;
  }

  // Mixer: groups, ratios and masks.
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  std::vector<std::vector<int>> groups;
  double max_lambda = 1.0;
  if (use_mixer) {
    groups = FormGroups(mixer_rng_, ids, cfg.group_size);
    max_lambda = 0.0;
    for (const auto& group : groups) {
      const MixingRatios ratios =
          DrawMixingRatios(mixer_rng_, static_cast<int>(group.size()), cfg.lambda);
      max_lambda = std::max(max_lambda, ratios.Max());
      MaskDownPayload payload;
      payload.client_ids = group;
      payload.lambdas = ratios.lambdas;
      if (kind == MixKind::kPatchCutMix) {
        payload.num_patches = num_patches;
        for (size_t b = 0; b < batch; ++b) {
          const auto masks = BuildPatchMasks(mixer_rng_, ratios, num_patches, group);
          payload.owners.push_back(OwnerMap(masks, num_patches));
        }
      } else if (kind == MixKind::kBoxCutMix) {
        payload.num_patches = num_patches;
        const int side = SquareGridSide(num_patches);
        for (size_t b = 0; b < batch; ++b) {
          payload.owners.push_back(
              BoxCutMixOwners(mixer_rng_, ratios.lambdas, side, side));
        }
      } else {
        payload.owners.resize(batch);
      }
      const std::vector<uint8_t> bytes = EncodeMaskDown(payload);
      for (int c : group) {
        transport_.Send({MessageKind::kMaskDown, kMixerId, static_cast<uint16_t>(c),
                         round_, bytes});
      }
      transport_.Send({MessageKind::kMaskDown, kMixerId, kServerId, round_, bytes});
    }
  } else {
    for (int c : ids) groups.push_back({c});
  }
  trace_.groups = groups;

  // Clients: masking, noise and upload.
  std::vector<std::vector<PatchMask>> client_masks(n);
  for (int c = 0; c < n; ++c) {
    const ClientBatch& cb = clients[c];
    std::vector<PatchMask>& masks = client_masks[c];
    if (use_mixer) {
      const MaskDownPayload md =
          DecodeMaskDown(transport_.Receive(static_cast<uint16_t>(c), MessageKind::kMaskDown).payload);
      const int slot = md.SlotOf(c);
      for (size_t b = 0; b < batch; ++b) {
        masks.push_back(kind == MixKind::kPatchCutMix
                            ? md.MaskFor(b, slot)
                            : PatchMask::Full(c, num_patches));
      }
    } else {
      masks = FullMasks(c, num_patches, batch);
    }
    std::vector<Tensor> uploads;
    std::vector<Tensor> labels;
    for (size_t b = 0; b < batch; ++b) {
      const SmashedData cut = Cutout(SmashedData{cb.clamped[b], c}, masks[b]);
      uploads.push_back(GaussianizeSmashed(noise_rngs_[c], cut.patches, masks[b], sigma_s));
      labels.push_back(GaussianizeLabel(
          noise_rngs_[c], OneHot(data_.train.labels[cb.indices[b]], cfg.model.num_classes),
          sigma_y));
    }
    transport_.Send({MessageKind::kSmashedUp, static_cast<uint16_t>(c), kServerId,
                     round_, EncodePatchBlocks(uploads, masks)});
    transport_.Send({MessageKind::kLabelUp, static_cast<uint16_t>(c), kServerId,
                     round_, EncodeLabels(labels)});
  }

  // Server: collect uploads and build the mixed items.
  std::map<int, std::vector<DecodedBlock>> smashed_in;
  std::map<int, std::vector<Tensor>> labels_in;
  std::map<int, MaskDownPayload> group_info;  // Keyed by first member.
  for (int i = 0; i < n; ++i) {
    RoundMessage m = transport_.Receive(kServerId, MessageKind::kSmashedUp);
    smashed_in[m.sender] = DecodePatchBlocks(m.payload);
    m = transport_.Receive(kServerId, MessageKind::kLabelUp);
    labels_in[m.sender] = DecodeLabels(m.payload);
  }
  if (use_mixer) {
    for (size_t g = 0; g < groups.size(); ++g) {
      MaskDownPayload md =
          DecodeMaskDown(transport_.Receive(kServerId, MessageKind::kMaskDown).payload);
      group_info[md.client_ids.front()] = std::move(md);
    }
  }
  for (const auto& [c, blocks] : smashed_in) {
    if (blocks.size() != batch || labels_in.at(c).size() != batch) {
      ThrowProtocol("client " + std::to_string(c) + " uploaded the wrong item count");
    }
  }

  std::vector<MixedBatchItem> items;
  for (const auto& group : groups) {
    const MaskDownPayload* md = use_mixer ? &group_info.at(group.front()) : nullptr;
    if (md && md->client_ids != group) ThrowProtocol("server and client groups differ");
    for (size_t b = 0; b < batch; ++b) {
      MixedBatchItem item;
      item.kind = kind;
      std::vector<WeightedLabel> wl;
      if (kind == MixKind::kNone) {
        const int c = group.front();
        item.smashed = SmashedData{smashed_in.at(c)[b].data, c};
        item.label = labels_in.at(c)[b];
        item.contributors.push_back({c, 1.0, PatchMask::Full(c, num_patches)});
      } else if (kind == MixKind::kMixup) {
        std::vector<WeightedSmashed> ws;
        for (size_t s = 0; s < group.size(); ++s) {
          const int c = group[s];
          ws.push_back({SmashedData{smashed_in.at(c)[b].data, c}, md->lambdas[s]});
          wl.push_back({labels_in.at(c)[b], md->lambdas[s]});
          item.contributors.push_back(
              {c, md->lambdas[s], PatchMask::Full(c, num_patches)});
        }
        item.smashed = Mixup(ws);
        item.label = MixLabels(wl);
      } else {
        std::vector<MaskedUpload> uploads;
        for (size_t s = 0; s < group.size(); ++s) {
          const int c = group[s];
          const PatchMask mask = md->MaskFor(b, static_cast<int>(s));
          const DecodedBlock& block = smashed_in.at(c)[b];
          double lambda = md->lambdas[s];
          SmashedData data{block.data, c};
          if (kind == MixKind::kPatchCutMix) {
            if (block.rows_present != mask.selected) {
              ThrowProtocol("client " + std::to_string(c) +
                            " uploaded patches outside its mask");
            }
          } else {
            data = Cutout(data, mask);
            lambda = static_cast<double>(mask.selected.size()) / num_patches;
          }
          uploads.push_back({data, mask});
          wl.push_back({labels_in.at(c)[b], lambda});
          item.contributors.push_back({c, lambda, mask});
        }
        item.smashed = PatchCutMixAggregate(uploads);
        item.label = MixLabels(wl);
      }
      items.push_back(std::move(item));
    }
  }

  ServerPass pass = ServerForwardBackward(state_.uppers.front(), items,
                                          1.0 / static_cast<double>(batch));
  // Each group's loss is a batch mean; the server step averages over groups.
  SgdStep(state_.uppers.front(), pass.upper_grads,
          state_.learning_rate / static_cast<double>(groups.size()));

  // Server: route cut-layer gradients back.
  std::map<int, std::vector<Tensor>> grads_out;
  std::map<int, std::vector<PatchMask>> grad_masks;
  for (size_t i = 0; i < items.size(); ++i) {
    for (size_t k = 0; k < items[i].contributors.size(); ++k) {
      const Contributor& contrib = items[i].contributors[k];
      grads_out[contrib.client_id].push_back(std::move(pass.cut_grads[i][k]));
      grad_masks[contrib.client_id].push_back(contrib.mask);
    }
  }
  for (int c = 0; c < n; ++c) {
    transport_.Send({MessageKind::kCutGradDown, kServerId, static_cast<uint16_t>(c),
                     round_, EncodePatchBlocks(grads_out.at(c), grad_masks.at(c))});
  }

  // Clients: backward through the clamp and the lower segment.
  for (int c = 0; c < n; ++c) {
    const std::vector<DecodedBlock> grads = DecodePatchBlocks(
        transport_.Receive(static_cast<uint16_t>(c), MessageKind::kCutGradDown).payload);
    if (grads.size() != batch) ThrowProtocol("wrong gradient item count");
    LowerSegment lower_grads = ZerosLike(state_.lowers[c]);
    for (size_t b = 0; b < batch; ++b) {
      const Tensor g = ClampGradient(clients[c].pre_clamp[b], grads[b].data, delta);
      LowerBackward(state_.lowers[c], clients[c].caches[b], g, &lower_grads);
    }
    SgdStep(state_.lowers[c], lower_grads, state_.learning_rate);
  }

  if (cfg.fedavg_lower) {
    for (int c = 0; c < n; ++c) {
      transport_.Send({MessageKind::kLowerWeightsUp, static_cast<uint16_t>(c), kServerId,
                       round_, SerializeParams(state_.lowers[c])});
    }
    std::vector<LowerSegment> received(n, state_.lowers.front());
    for (int i = 0; i < n; ++i) {
      const RoundMessage m = transport_.Receive(kServerId, MessageKind::kLowerWeightsUp);
      DeserializeParams(m.payload, &received.at(m.sender));
    }
    const std::vector<uint8_t> avg = SerializeParams(FedAvgLower(received));
    for (int c = 0; c < n; ++c) {
      transport_.Send({MessageKind::kAvgWeightsDown, kServerId, static_cast<uint16_t>(c),
                       round_, avg});
    }
    for (int c = 0; c < n; ++c) {
      DeserializeParams(
          transport_.Receive(static_cast<uint16_t>(c), MessageKind::kAvgWeightsDown).payload,
          &state_.lowers[c]);
    }
  }

  trace_.server_items = std::move(items);
  RoundMetrics metrics;
  metrics.round = round_;
  metrics.num_groups = static_cast<int>(groups.size());
  metrics.train_loss = pass.loss / static_cast<double>(groups.size());
  metrics.max_lambda = max_lambda;
  metrics.uplink_bytes = transport_.log().UplinkBytes(round_);
  metrics.downlink_bytes = transport_.log().DownlinkBytes(round_);
  return metrics;
}

RoundMetrics Simulator::RunStandaloneRound() {
  const ExperimentConfig& cfg = config_;
  const int n = cfg.num_clients;
  const int num_patches = cfg.model.num_patches();
  const size_t batch = cfg.batch_size;
  const double delta = cfg.privacy.delta_bound;
  const bool cutout = cfg.mode == Mode::kStandaloneCutout;

  transport_.BeginRound(round_);
  trace_ = RoundTrace{};
  double loss = 0.0;
  for (int c = 0; c < n; ++c) {
    const std::vector<int> indices = NextBatch(c);
    std::vector<LowerCache> caches(batch);
    std::vector<Tensor> pre_clamp;
    std::vector<MixedBatchItem> items;
    for (size_t b = 0; b < batch; ++b) {
      pre_clamp.push_back(LowerForward(state_.lowers[c], data_.train.images[indices[b]],
                                       &caches[b]));
      const Tensor clamped = ClampSmashed(pre_clamp.back(), delta);
      trace_.clamped[c].push_back(clamped);
      PatchMask mask = PatchMask::Full(c, num_patches);
      if (cutout) {
        mask = CutoutBoxMask(noise_rngs_[c], cfg.model.grid_h(), cfg.model.grid_w(), c);
      }
      MixedBatchItem item;
      item.smashed = Cutout(SmashedData{clamped, c}, mask);
      item.label = OneHot(data_.train.labels[indices[b]], cfg.model.num_classes);
      item.contributors.push_back({c, 1.0, mask});
      items.push_back(std::move(item));
    }
    ServerPass pass = ServerForwardBackward(state_.uppers[c], items,
                                            1.0 / static_cast<double>(batch));
    SgdStep(state_.uppers[c], pass.upper_grads, state_.learning_rate);
    LowerSegment lower_grads = ZerosLike(state_.lowers[c]);
    for (size_t b = 0; b < batch; ++b) {
      const Tensor g = ClampGradient(pre_clamp[b], pass.cut_grads[b][0], delta);
      LowerBackward(state_.lowers[c], caches[b], g, &lower_grads);
    }
    SgdStep(state_.lowers[c], lower_grads, state_.learning_rate);
    loss += pass.loss;
    trace_.groups.push_back({c});
  }
  RoundMetrics metrics;
  metrics.round = round_;
  metrics.num_groups = n;
  metrics.train_loss = loss / n;
  metrics.max_lambda = 1.0;
  return metrics;
}

double Simulator::Evaluate() const {
  const int n = config_.num_clients;
  const Dataset& test = data_.test;
  if (test.size() == 0) return 0.0;
  size_t correct = 0;
  for (size_t i = 0; i < test.size(); ++i) {
    const int c = static_cast<int>(i % n);
    const Tensor s = ClampSmashed(LowerForward(state_.lowers[c], test.images[i]),
                                  config_.privacy.delta_bound);
    if (Argmax(UpperForward(UpperFor(c), s)) == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace splitmix
