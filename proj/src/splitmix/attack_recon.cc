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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "splitmix/dp_mechanism.h"
#include "splitmix/error.h"
#include "splitmix/interpolation.h"
#include "splitmix/mixer.h"
#include "splitmix/simulator.h"
#include "splitmix/split_vit.h"

namespace splitmix {
namespace {

constexpr uint64_t kAttackPairStream = 6;
constexpr uint64_t kDecoderStream = 7;

struct ForwardCache {
  Tensor scaled;  // N × in_dim
  Tensor up;      // H × W × hidden
  Tensor out;     // H × W × C
};

size_t Idx3(size_t y, size_t x, size_t c, size_t w, size_t ch) {
  return (y * w + x) * ch + c;
}

ForwardCache RunForward(const Decoder& d, const Tensor& rep) {
  const DecoderConfig& c = d.config;
  if (rep.rank() != 2 || rep.rows() != static_cast<size_t>(c.grid_h * c.grid_w) ||
      rep.cols() != static_cast<size_t>(c.in_dim)) {
    ThrowShape("decoder input " + rep.ShapeString() + " does not match the config");
  }
  const int q = c.patch_size / c.upsample;
  const int u = c.upsample;
  const int ch = c.hidden_channels;
  const int h = c.height(), w = c.width();
  ForwardCache f;
  f.scaled = rep;
  ScaleInPlace(f.scaled, d.input_scale);
  const Tensor small = Unpatchify(MatMul(f.scaled, d.stage1), c.grid_h * q,
                                  c.grid_w * q, ch, q);
  f.up = Tensor({static_cast<size_t>(h), static_cast<size_t>(w),
                 static_cast<size_t>(ch)});
  const int sw = c.grid_w * q;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < ch; ++k) {
        f.up[Idx3(y, x, k, w, ch)] = small[Idx3(y / u, x / u, k, sw, ch)];
      }
    }
  }
  const int co = c.out_channels;
  f.out = Tensor({static_cast<size_t>(h), static_cast<size_t>(w),
                  static_cast<size_t>(co)});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int dy = 0; dy < 3; ++dy) {
        const int yy = y + dy - 1;
        if (yy < 0 || yy >= h) continue;
        for (int dx = 0; dx < 3; ++dx) {
          const int xx = x + dx - 1;
          if (xx < 0 || xx >= w) continue;
          for (int i = 0; i < ch; ++i) {
            const double v = f.up[Idx3(yy, xx, i, w, ch)];
            const size_t kbase = ((static_cast<size_t>(dy) * 3 + dx) * ch + i) * co;
            for (int o = 0; o < co; ++o) {
              f.out[Idx3(y, x, o, w, co)] += v * d.kernel[kbase + o];
            }
          }
        }
      }
    }
  }
  return f;
}

// Accumulates gradients of weight · MSE(out, target).
void Backward(const Decoder& d, const ForwardCache& f, const Tensor& target,
              double weight, Tensor* g_stage1, Tensor* g_kernel) {
  const DecoderConfig& c = d.config;
  const int q = c.patch_size / c.upsample;
  const int u = c.upsample;
  const int ch = c.hidden_channels;
  const int co = c.out_channels;
  const int h = c.height(), w = c.width();
  const double scale = 2.0 * weight / static_cast<double>(f.out.size());
  Tensor dout = Sub(f.out, target);
  ScaleInPlace(dout, scale);

  Tensor dup(f.up.shape());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int dy = 0; dy < 3; ++dy) {
        const int yy = y + dy - 1;
        if (yy < 0 || yy >= h) continue;
        for (int dx = 0; dx < 3; ++dx) {
          const int xx = x + dx - 1;
          if (xx < 0 || xx >= w) continue;
          for (int i = 0; i < ch; ++i) {
            const size_t ui = Idx3(yy, xx, i, w, ch);
            const size_t kbase = ((static_cast<size_t>(dy) * 3 + dx) * ch + i) * co;
            for (int o = 0; o < co; ++o) {
              const double go = dout[Idx3(y, x, o, w, co)];
              (*g_kernel)[kbase + o] += f.up[ui] * go;
              dup[ui] += d.kernel[kbase + o] * go;
            }
          }
        }
      }
    }
  }
  const int sh = c.grid_h * q, sw = c.grid_w * q;
  Tensor dsmall({static_cast<size_t>(sh), static_cast<size_t>(sw),
                 static_cast<size_t>(ch)});
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int k = 0; k < ch; ++k) {
        dsmall[Idx3(y / u, x / u, k, sw, ch)] += dup[Idx3(y, x, k, w, ch)];
      }
    }
  }
  AddInPlace(*g_stage1, MatMulTransA(f.scaled, Patchify(dsmall, q)));
}

double PairMse(const Tensor& out, const Tensor& target) {
  return SumSquares(Sub(out, target)) / static_cast<double>(out.size());
}

}  // namespace

void DecoderConfig::Validate() const {
  if (grid_h < 1 || grid_w < 1 || patch_size < 1 || in_dim < 1 ||
      out_channels < 1 || hidden_channels < 1 || upsample < 1 ||
      patch_size % upsample != 0) {
    ThrowParameter("decoder config is invalid");
  }
}

Decoder InitDecoder(const DecoderConfig& config, SeededRng& rng) {
  config.Validate();
  const int q = config.patch_size / config.upsample;
  Decoder d;
  d.config = config;
  d.stage1 = SampleGaussian(
      rng,
      {static_cast<size_t>(config.in_dim),
       static_cast<size_t>(q * q * config.hidden_channels)},
      1.0 / std::sqrt(static_cast<double>(config.in_dim)));
  d.kernel = SampleGaussian(
      rng,
      {3, 3, static_cast<size_t>(config.hidden_channels),
       static_cast<size_t>(config.out_channels)},
      1.0 / std::sqrt(9.0 * config.hidden_channels));
  return d;
}

Tensor DecoderForward(const Decoder& decoder, const Tensor& representation) {
  return RunForward(decoder, representation).out;
}

std::vector<Tensor> DecoderGradients(const Decoder& decoder,
                                     std::span<const AttackPair> pairs,
                                     double* loss) {
  if (pairs.empty()) ThrowParameter("DecoderGradients: no pairs");
  std::vector<Tensor> grads = {Tensor(decoder.stage1.shape()),
                               Tensor(decoder.kernel.shape())};
  const double weight = 1.0 / static_cast<double>(pairs.size());
  double total = 0.0;
  for (const AttackPair& p : pairs) {
    const ForwardCache f = RunForward(decoder, p.representation);
    if (!f.out.SameShape(p.image)) ThrowShape("decoder target shape mismatch");
    total += weight * PairMse(f.out, p.image);
    Backward(decoder, f, p.image, weight, &grads[0], &grads[1]);
  }
  if (loss) *loss = total;
  return grads;
}

Decoder TrainDecoder(SeededRng& rng, const DecoderConfig& config,
                     std::span<const AttackPair> pairs,
                     const DecoderTraining& training) {
  if (pairs.empty()) ThrowParameter("TrainDecoder: empty training set");
  if (training.epochs < 0 || training.batch_size < 1 ||
      !(training.learning_rate > 0.0)) {
    ThrowParameter("TrainDecoder: invalid training settings");
  }
  Decoder d = InitDecoder(config, rng);
  double sq = 0.0;
  size_t count = 0;
  for (const AttackPair& p : pairs) {
    sq += SumSquares(p.representation);
    count += p.representation.size();
  }
  const double rms = std::sqrt(sq / static_cast<double>(count));
  d.input_scale = rms > 0.0 ? 1.0 / rms : 1.0;

  Tensor v1(d.stage1.shape());
  Tensor v2(d.kernel.shape());
  std::vector<size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < training.epochs; ++epoch) {
    rng.Shuffle(std::span<size_t>(order));
    for (size_t start = 0; start < order.size(); start += training.batch_size) {
      const size_t end = std::min(order.size(), start + training.batch_size);
      std::vector<AttackPair> batch;
      for (size_t i = start; i < end; ++i) batch.push_back(pairs[order[i]]);
      const std::vector<Tensor> g = DecoderGradients(d, batch, nullptr);
      ScaleInPlace(v1, training.momentum);
      Axpy(-training.learning_rate, g[0], v1);
      ScaleInPlace(v2, training.momentum);
      Axpy(-training.learning_rate, g[1], v2);
      AddInPlace(d.stage1, v1);
      AddInPlace(d.kernel, v2);
    }
  }
  return d;
}

double ReconstructionMse(const Decoder& decoder,
                         std::span<const AttackPair> pairs) {
  if (pairs.empty()) ThrowParameter("ReconstructionMse: empty evaluation set");
  double total = 0.0;
  for (const AttackPair& p : pairs) {
    const Tensor out = DecoderForward(decoder, p.representation);
    if (!out.SameShape(p.image)) ThrowShape("decoder target shape mismatch");
    total += PairMse(out, p.image);
  }
  return total / static_cast<double>(pairs.size());
}

std::string LeakageSchemeName(LeakageScheme scheme) {
  switch (scheme) {
    case LeakageScheme::kRawSmashed:
      return "raw_smashed";
    case LeakageScheme::kMixup:
      return "mixup";
    case LeakageScheme::kPatchCutMix:
      return "patch_cutmix";
    case LeakageScheme::kCutout:
      return "cutout";
  }
  return "unknown";
}

std::vector<LeakageScheme> AllLeakageSchemes() {
  return {LeakageScheme::kRawSmashed, LeakageScheme::kMixup,
          LeakageScheme::kPatchCutMix, LeakageScheme::kCutout};
}

double LeakageReport::Median(LeakageScheme scheme, double train_fraction) const {
  std::vector<double> values;
  for (const LeakageRow& r : rows) {
    if (r.scheme == scheme && r.train_fraction == train_fraction) values.push_back(r.mse);
  }
  if (values.empty()) ThrowParameter("LeakageReport: no rows for the query");
  std::sort(values.begin(), values.end());
  const size_t m = values.size() / 2;
  return values.size() % 2 == 1 ? values[m] : 0.5 * (values[m - 1] + values[m]);
}

std::string LeakageReport::ToCsv() const {
  std::ostringstream out;
  out.precision(10);
  out << "scheme,train_fraction,seed,mse\n";
  for (const LeakageRow& r : rows) {
    out << LeakageSchemeName(r.scheme) << ',' << r.train_fraction << ',' << r.seed
        << ',' << r.mse << '\n';
  }
  return out.str();
}

namespace {

// Representations of one image under every scheme, target = that image.
void BuildAttackPairs(const LowerSegment& lower, const Dataset& pool,
                      size_t count, int group_size, double delta,
                      SeededRng& rng,
                      std::vector<std::vector<AttackPair>>* per_scheme) {
  const int num_patches = static_cast<int>(lower.positions.rows());
  const MixingRatios uniform{
      std::vector<double>(group_size, 1.0 / group_size)};
  std::vector<Tensor> smashed;
  for (size_t i = 0; i < count; ++i) {
    smashed.push_back(ClampSmashed(LowerForward(lower, pool.images[i]), delta));
  }
  per_scheme->assign(AllLeakageSchemes().size(), {});
  for (size_t i = 0; i < count; ++i) {
    std::vector<size_t> members = {i};
    while (members.size() < static_cast<size_t>(group_size)) {
      const size_t j = rng.NextBelow(count);
      if (std::find(members.begin(), members.end(), j) == members.end()) {
        members.push_back(j);
      }
    }
    const std::vector<PatchMask> masks = BuildPatchMasks(rng, uniform, num_patches);
    std::vector<WeightedSmashed> mix;
    std::vector<MaskedUpload> uploads;
    for (size_t k = 0; k < members.size(); ++k) {
      const SmashedData s{smashed[members[k]], static_cast<int>(k)};
      mix.push_back({s, uniform.lambdas[k]});
      uploads.push_back({Cutout(s, masks[k]), masks[k]});
    }
    const Tensor& target = pool.images[i];
    (*per_scheme)[0].push_back({smashed[i], target});
    (*per_scheme)[1].push_back({Mixup(mix).patches, target});
    (*per_scheme)[2].push_back({PatchCutMixAggregate(uploads).patches, target});
    (*per_scheme)[3].push_back({uploads[0].data.patches, target});
  }
}

}  // namespace

LeakageReport RunLeakageSweep(const ExperimentConfig& config) {
  config.Validate();
  const AttackSpec& spec = config.attack;
  DecoderConfig dc;
  dc.grid_h = config.model.grid_h();
  dc.grid_w = config.model.grid_w();
  dc.patch_size = config.model.patch_size;
  dc.in_dim = config.model.embed_dim;
  dc.out_channels = config.model.channels;
  dc.hidden_channels = spec.hidden_channels;
  dc.upsample = spec.upsample;
  DecoderTraining training;
  training.epochs = spec.epochs;
  training.learning_rate = spec.learning_rate;
  training.batch_size = spec.batch_size;

  const auto schemes = AllLeakageSchemes();
  LeakageReport report;
  for (int k = 0; k < spec.num_seeds; ++k) {
    ExperimentConfig pre = config;
    pre.mode = Mode::kPlainSl;
    pre.num_clients = 1;
    pre.group_size = 1;
    pre.fedavg_lower = false;
    pre.epochs = spec.pretrain_epochs;
    pre.max_rounds = 0;
    pre.seed = config.seed + static_cast<uint64_t>(k);
    Simulator sim(pre);
    for (int r = 0; r < sim.total_rounds(); ++r) sim.RunRound();
    const LowerSegment& lower = sim.state().lowers.front();

    SeededRng pair_rng(pre.seed, kAttackPairStream);
    const size_t train_count =
        std::min<size_t>(spec.train_count, sim.data().train.size());
    const size_t test_count = std::min<size_t>(spec.test_count, sim.data().test.size());
    if (train_count < static_cast<size_t>(spec.group_size) ||
        test_count < static_cast<size_t>(spec.group_size)) {
      ThrowConfig("attack needs at least group_size train and test images");
    }
    std::vector<std::vector<AttackPair>> train_pairs, test_pairs;
    BuildAttackPairs(lower, sim.data().train, train_count, spec.group_size,
                     config.privacy.delta_bound, pair_rng, &train_pairs);
    BuildAttackPairs(lower, sim.data().test, test_count, spec.group_size,
                     config.privacy.delta_bound, pair_rng, &test_pairs);

    for (double fraction : spec.train_fractions) {
      const size_t used = std::max<size_t>(
          1, static_cast<size_t>(std::ceil(fraction * static_cast<double>(train_count))));
      for (size_t s = 0; s < schemes.size(); ++s) {
        SeededRng decoder_rng(pre.seed, kDecoderStream);
        const Decoder d = TrainDecoder(
            decoder_rng, dc, std::span(train_pairs[s]).first(used), training);
        report.rows.push_back(
            {schemes[s], fraction, pre.seed, ReconstructionMse(d, test_pairs[s])});
      }
    }
  }
  return report;
}

}  // namespace splitmix
