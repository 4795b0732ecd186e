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

#include "splitmix/split_vit.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "splitmix/bytes.h"
#include "splitmix/error.h"

namespace splitmix {
namespace {

constexpr double kLayerNormEps = 1e-5;
constexpr double kGeluCoeff = 0.044715;

const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

Tensor GaussianInit(SeededRng& rng, std::vector<size_t> shape, double std) {
  return SampleGaussian(rng, shape, std);
}

Linear InitLinear(SeededRng& rng, size_t in, size_t out, double std) {
  return Linear{GaussianInit(rng, {in, out}, std), Tensor({out})};
}

LayerNorm InitLayerNorm(size_t dim) {
  return LayerNorm{Tensor({dim}, 1.0), Tensor({dim})};
}

Tensor LinearForward(const Linear& layer, const Tensor& x) {
  Tensor y = MatMul(x, layer.weight);
  AddRowVector(y, layer.bias);
  return y;
}

// Accumulates weight/bias gradients; returns ∂/∂x.
Tensor LinearBackward(const Linear& layer, const Tensor& x, const Tensor& dy,
                      Linear* grads) {
  AddInPlace(grads->weight, MatMulTransA(x, dy));
  AddInPlace(grads->bias, ColumnSums(dy));
  return MatMulTransB(dy, layer.weight);
}

Tensor LayerNormForward(const LayerNorm& ln, const Tensor& x,
                        LayerNormCache* cache) {
  const size_t rows = x.rows(), cols = x.cols();
  Tensor y = Tensor::Matrix(rows, cols);
  cache->normalized = Tensor::Matrix(rows, cols);
  cache->inv_std.assign(rows, 0.0);
  for (size_t r = 0; r < rows; ++r) {
    auto in = x.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= cols;
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= cols;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    cache->inv_std[r] = inv;
    auto xhat = cache->normalized.row(r);
    auto out = y.row(r);
    for (size_t c = 0; c < cols; ++c) {
      xhat[c] = (in[c] - mean) * inv;
      out[c] = ln.gamma[c] * xhat[c] + ln.beta[c];
    }
  }
  return y;
}

Tensor LayerNormBackward(const LayerNorm& ln, const LayerNormCache& cache,
                         const Tensor& dy, LayerNorm* grads) {
  const size_t rows = dy.rows(), cols = dy.cols();
  Tensor dx = Tensor::Matrix(rows, cols);
  std::vector<double> dxhat(cols);
  for (size_t r = 0; r < rows; ++r) {
    auto g = dy.row(r);
    auto xhat = cache.normalized.row(r);
    double mean_dxhat = 0.0, mean_dxhat_xhat = 0.0;
    for (size_t c = 0; c < cols; ++c) {
      grads->gamma[c] += g[c] * xhat[c];
      grads->beta[c] += g[c];
      dxhat[c] = g[c] * ln.gamma[c];
      mean_dxhat += dxhat[c];
      mean_dxhat_xhat += dxhat[c] * xhat[c];
    }
    mean_dxhat /= cols;
    mean_dxhat_xhat /= cols;
    auto out = dx.row(r);
    for (size_t c = 0; c < cols; ++c) {
      out[c] = cache.inv_std[r] *
               (dxhat[c] - mean_dxhat - xhat[c] * mean_dxhat_xhat);
    }
  }
  return dx;
}

double Gelu(double x) {
  return 0.5 * x *
         (1.0 + std::tanh(kSqrt2OverPi * (x + kGeluCoeff * x * x * x)));
}

double GeluDerivative(double x) {
  const double inner = kSqrt2OverPi * (x + kGeluCoeff * x * x * x);
  const double t = std::tanh(inner);
  const double dinner = kSqrt2OverPi * (1.0 + 3.0 * kGeluCoeff * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * dinner;
}

Tensor ColumnBlock(const Tensor& m, size_t start, size_t width) {
  Tensor out = Tensor::Matrix(m.rows(), width);
  for (size_t r = 0; r < m.rows(); ++r) {
    for (size_t c = 0; c < width; ++c) out(r, c) = m(r, start + c);
  }
  return out;
}

void SetColumnBlock(Tensor& m, size_t start, const Tensor& block) {
  for (size_t r = 0; r < block.rows(); ++r) {
    for (size_t c = 0; c < block.cols(); ++c) m(r, start + c) = block(r, c);
  }
}

Tensor BlockForward(const EncoderBlock& blk, int num_heads, const Tensor& x,
                    BlockCache* cache) {
  const size_t n = x.rows(), d = x.cols();
  const size_t head_dim = d / num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  cache->input = x;
  cache->norm1_out = LayerNormForward(blk.norm1, x, &cache->norm1);
  cache->q = LinearForward(blk.query, cache->norm1_out);
  cache->k = LinearForward(blk.key, cache->norm1_out);
  cache->v = LinearForward(blk.value, cache->norm1_out);
  cache->probs.assign(num_heads, Tensor());
  cache->attn_concat = Tensor::Matrix(n, d);
  for (int h = 0; h < num_heads; ++h) {
    const size_t off = h * head_dim;
    const Tensor qh = ColumnBlock(cache->q, off, head_dim);
    const Tensor kh = ColumnBlock(cache->k, off, head_dim);
    const Tensor vh = ColumnBlock(cache->v, off, head_dim);
    Tensor scores = MatMulTransB(qh, kh);
    ScaleInPlace(scores, scale);
    cache->probs[h] = SoftmaxRows(scores);
    SetColumnBlock(cache->attn_concat, off, MatMul(cache->probs[h], vh));
  }
  cache->residual = Add(x, LinearForward(blk.proj, cache->attn_concat));
  cache->norm2_out = LayerNormForward(blk.norm2, cache->residual, &cache->norm2);
  cache->fc1_pre = LinearForward(blk.fc1, cache->norm2_out);
  cache->fc1_act = cache->fc1_pre;
  for (double& v : cache->fc1_act.data()) v = Gelu(v);
  return Add(cache->residual, LinearForward(blk.fc2, cache->fc1_act));
}

Tensor BlockBackward(const EncoderBlock& blk, int num_heads,
                     const BlockCache& cache, const Tensor& dout,
                     EncoderBlock* grads) {
  const size_t d = dout.cols();
  const size_t head_dim = d / num_heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));

  // MLP branch.
  Tensor dact = LinearBackward(blk.fc2, cache.fc1_act, dout, &grads->fc2);
  for (size_t i = 0; i < dact.size(); ++i) {
    dact[i] *= GeluDerivative(cache.fc1_pre[i]);
  }
  Tensor dnorm2 = LinearBackward(blk.fc1, cache.norm2_out, dact, &grads->fc1);
  Tensor dresidual = Add(
      dout, LayerNormBackward(blk.norm2, cache.norm2, dnorm2, &grads->norm2));

  // Attention branch.
  Tensor dconcat =
      LinearBackward(blk.proj, cache.attn_concat, dresidual, &grads->proj);
  Tensor dq = Tensor::Matrix(dout.rows(), d);
  Tensor dk = Tensor::Matrix(dout.rows(), d);
  Tensor dv = Tensor::Matrix(dout.rows(), d);
  for (int h = 0; h < num_heads; ++h) {
    const size_t off = h * head_dim;
    const Tensor& probs = cache.probs[h];
    const Tensor qh = ColumnBlock(cache.q, off, head_dim);
    const Tensor kh = ColumnBlock(cache.k, off, head_dim);
    const Tensor vh = ColumnBlock(cache.v, off, head_dim);
    const Tensor doh = ColumnBlock(dconcat, off, head_dim);
    Tensor dprobs = MatMulTransB(doh, vh);
    SetColumnBlock(dv, off, MatMulTransA(probs, doh));
    Tensor dscores = Tensor::Matrix(probs.rows(), probs.cols());
    for (size_t r = 0; r < probs.rows(); ++r) {
      double dot = 0.0;
      for (size_t c = 0; c < probs.cols(); ++c) dot += dprobs(r, c) * probs(r, c);
      for (size_t c = 0; c < probs.cols(); ++c) {
        dscores(r, c) = probs(r, c) * (dprobs(r, c) - dot) * scale;
      }
    }
    SetColumnBlock(dq, off, MatMul(dscores, kh));
    SetColumnBlock(dk, off, MatMulTransA(dscores, qh));
  }
  Tensor dnorm1 = LinearBackward(blk.query, cache.norm1_out, dq, &grads->query);
  AddInPlace(dnorm1, LinearBackward(blk.key, cache.norm1_out, dk, &grads->key));
  AddInPlace(dnorm1,
             LinearBackward(blk.value, cache.norm1_out, dv, &grads->value));
  return Add(dresidual,
             LayerNormBackward(blk.norm1, cache.norm1, dnorm1, &grads->norm1));
}

template <typename Seg>
Seg ZerosLikeImpl(const Seg& seg) {
  Seg out = seg;
  ForEachParam(out, [](const std::string&, Tensor& t) { t.Fill(0.0); });
  return out;
}

template <typename Seg>
void SgdStepImpl(Seg& seg, const Seg& grads, double lr) {
  std::vector<Tensor*> params;
  std::vector<const Tensor*> gs;
  ForEachParam(seg, [&](const std::string&, Tensor& t) { params.push_back(&t); });
  ForEachParam(grads,
               [&](const std::string&, const Tensor& t) { gs.push_back(&t); });
  if (params.size() != gs.size()) ThrowShape("SgdStep: parameter count mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->SameShape(*gs[i])) ThrowShape("SgdStep: gradient shape mismatch");
    auto p = params[i]->data();
    auto g = gs[i]->data();
    for (size_t k = 0; k < p.size(); ++k) p[k] -= lr * g[k];
  }
}

template <typename Seg>
std::vector<uint8_t> SerializeImpl(const Seg& seg) {
  ByteWriter w;
  uint32_t count = 0;
  ForEachParam(seg, [&](const std::string&, const Tensor&) { ++count; });
  w.U32(count);
  ForEachParam(seg, [&](const std::string& name, const Tensor& t) {
    w.String(name);
    w.U8(static_cast<uint8_t>(t.rank()));
    for (size_t d : t.shape()) w.U32(static_cast<uint32_t>(d));
    for (double v : t.data()) w.F64(v);
  });
  return w.Take();
}

template <typename Seg>
void DeserializeImpl(std::span<const uint8_t> bytes, Seg* seg) {
  ByteReader r(bytes);
  uint32_t expected = 0;
  ForEachParam(*seg, [&](const std::string&, Tensor&) { ++expected; });
  const uint32_t count = r.U32();
  if (count != expected) {
    ThrowShape("checkpoint has " + std::to_string(count) + " records, model has " +
               std::to_string(expected));
  }
  ForEachParam(*seg, [&](const std::string& name, Tensor& t) {
    const std::string stored = r.String();
    if (stored != name) {
      ThrowShape("checkpoint record '" + stored + "' where '" + name +
                 "' was expected");
    }
    const size_t rank = r.U8();
    std::vector<size_t> shape(rank);
    for (size_t& d : shape) d = r.U32();
    if (shape != t.shape()) ThrowShape("checkpoint shape mismatch for " + name);
    for (double& v : t.data()) v = r.F64();
  });
  if (!r.done()) ThrowShape("checkpoint has trailing bytes");
}

}  // namespace

void ModelConfig::Validate() const {
  if (image_height <= 0 || image_width <= 0 || channels <= 0) {
    ThrowParameter("model: image dimensions must be positive");
  }
  if (patch_size <= 0 || image_height % patch_size != 0 ||
      image_width % patch_size != 0) {
    ThrowShape("model: image " + std::to_string(image_height) + "x" +
               std::to_string(image_width) + " not divisible by patch size " +
               std::to_string(patch_size));
  }
  if (embed_dim <= 0 || num_heads <= 0 || embed_dim % num_heads != 0) {
    ThrowParameter("model: embed_dim must be a positive multiple of num_heads");
  }
  if (num_blocks < 0 || mlp_ratio <= 0 || num_classes < 2) {
    ThrowParameter("model: invalid depth, mlp ratio or class count");
  }
  if (!(init_std >= 0.0)) ThrowParameter("model: init_std must be >= 0");
}

LowerSegment InitLowerSegment(const ModelConfig& config, SeededRng& rng) {
  config.Validate();
  const size_t d = config.embed_dim;
  LowerSegment seg;
  seg.patch_size = config.patch_size;
  seg.channels = config.channels;
  seg.embed = InitLinear(rng, config.patch_dim(), d, config.init_std);
  seg.positions = GaussianInit(rng, {static_cast<size_t>(config.num_patches()), d},
                               config.init_std);
  return seg;
}

UpperSegment InitUpperSegment(const ModelConfig& config, SeededRng& rng) {
  config.Validate();
  const size_t d = config.embed_dim;
  const size_t hidden = d * config.mlp_ratio;
  const double std = config.init_std;
  UpperSegment seg;
  seg.num_heads = config.num_heads;
  for (int b = 0; b < config.num_blocks; ++b) {
    EncoderBlock blk;
    blk.norm1 = InitLayerNorm(d);
    blk.query = InitLinear(rng, d, d, std);
    blk.key = InitLinear(rng, d, d, std);
    blk.value = InitLinear(rng, d, d, std);
    blk.proj = InitLinear(rng, d, d, std);
    blk.norm2 = InitLayerNorm(d);
    blk.fc1 = InitLinear(rng, d, hidden, std);
    blk.fc2 = InitLinear(rng, hidden, d, std);
    seg.blocks.push_back(std::move(blk));
  }
  seg.final_norm = InitLayerNorm(d);
  seg.head = InitLinear(rng, d, config.num_classes, std);
  return seg;
}

LowerSegment ZerosLike(const LowerSegment& seg) { return ZerosLikeImpl(seg); }
UpperSegment ZerosLike(const UpperSegment& seg) { return ZerosLikeImpl(seg); }

Tensor Patchify(const Tensor& image, int patch_size) {
  if (image.rank() != 3) ThrowShape("Patchify: expected H×W×C image");
  const int h = image.dim(0), w = image.dim(1), c = image.dim(2);
  if (patch_size <= 0 || h % patch_size != 0 || w % patch_size != 0) {
    ThrowShape("Patchify: image " + image.ShapeString() +
               " not divisible by patch size " + std::to_string(patch_size));
  }
  const int gh = h / patch_size, gw = w / patch_size;
  Tensor out = Tensor::Matrix(gh * gw, patch_size * patch_size * c);
  for (int gy = 0; gy < gh; ++gy) {
    for (int gx = 0; gx < gw; ++gx) {
      auto row = out.row(gy * gw + gx);
      size_t k = 0;
      for (int py = 0; py < patch_size; ++py) {
        for (int px = 0; px < patch_size; ++px) {
          const size_t base =
              ((static_cast<size_t>(gy * patch_size + py) * w) +
               (gx * patch_size + px)) * c;
          for (int ch = 0; ch < c; ++ch) row[k++] = image[base + ch];
        }
      }
    }
  }
  return out;
}

Tensor Unpatchify(const Tensor& patches, int height, int width, int channels,
                  int patch_size) {
  const int gw = width / patch_size;
  Tensor image({static_cast<size_t>(height), static_cast<size_t>(width),
                static_cast<size_t>(channels)});
  if (patches.rank() != 2 ||
      patches.rows() != static_cast<size_t>((height / patch_size) * gw) ||
      patches.cols() != static_cast<size_t>(patch_size * patch_size * channels)) {
    ThrowShape("Unpatchify: patches " + patches.ShapeString() +
               " do not match the image geometry");
  }
  for (size_t p = 0; p < patches.rows(); ++p) {
    const int gy = static_cast<int>(p) / gw, gx = static_cast<int>(p) % gw;
    auto row = patches.row(p);
    size_t k = 0;
    for (int py = 0; py < patch_size; ++py) {
      for (int px = 0; px < patch_size; ++px) {
        const size_t base = ((static_cast<size_t>(gy * patch_size + py) * width) +
                             (gx * patch_size + px)) * channels;
        for (int ch = 0; ch < channels; ++ch) image[base + ch] = row[k++];
      }
    }
  }
  return image;
}

Tensor LowerForward(const LowerSegment& seg, const Tensor& image,
                    LowerCache* cache) {
  if (image.rank() != 3 || image.dim(2) != static_cast<size_t>(seg.channels)) {
    ThrowShape("LowerForward: image " + image.ShapeString() +
               " does not have " + std::to_string(seg.channels) + " channels");
  }
  Tensor patches = Patchify(image, seg.patch_size);
  if (patches.rows() != seg.positions.rows()) {
    ThrowShape("LowerForward: image yields " + std::to_string(patches.rows()) +
               " patches, model expects " + std::to_string(seg.positions.rows()));
  }
  Tensor out = LinearForward(seg.embed, patches);
  AddInPlace(out, seg.positions);
  if (cache) {
    cache->patches = std::move(patches);
    cache->valid = true;
  }
  return out;
}

void LowerBackward(const LowerSegment& seg, const LowerCache& cache,
                   const Tensor& grad_smashed, LowerSegment* grads) {
  if (!cache.valid) ThrowState("LowerBackward: no forward cache");
  if (!grad_smashed.SameShape(seg.positions)) {
    ThrowShape("LowerBackward: gradient shape " + grad_smashed.ShapeString());
  }
  AddInPlace(grads->positions, grad_smashed);
  AddInPlace(grads->embed.weight, MatMulTransA(cache.patches, grad_smashed));
  AddInPlace(grads->embed.bias, ColumnSums(grad_smashed));
}

Tensor UpperForward(const UpperSegment& seg, const Tensor& x,
                    UpperCache* cache) {
  const size_t d = seg.final_norm.gamma.size();
  if (x.rank() != 2 || x.cols() != d || x.rows() == 0) {
    ThrowShape("UpperForward: input " + x.ShapeString() +
               " does not match embed dim " + std::to_string(d));
  }
  UpperCache local;
  UpperCache& c = cache ? *cache : local;
  c.valid = false;
  c.blocks.resize(seg.blocks.size());
  Tensor h = x;
  for (size_t b = 0; b < seg.blocks.size(); ++b) {
    h = BlockForward(seg.blocks[b], seg.num_heads, h, &c.blocks[b]);
  }
  const Tensor z = LayerNormForward(seg.final_norm, h, &c.final_norm);
  c.pooled = ColumnSums(z).Reshaped({1, d});
  ScaleInPlace(c.pooled, 1.0 / static_cast<double>(z.rows()));
  c.logits = LinearForward(seg.head, c.pooled).Reshaped({seg.head.bias.size()});
  c.valid = true;
  return c.logits;
}

Tensor UpperBackward(const UpperSegment& seg, const UpperCache& cache,
                     const Tensor& grad_logits, UpperSegment* grads) {
  if (!cache.valid) ThrowState("UpperBackward: no forward cache");
  const size_t num_classes = seg.head.bias.size();
  if (grad_logits.size() != num_classes) {
    ThrowShape("UpperBackward: logit gradient has wrong length");
  }
  const Tensor dlogits = grad_logits.Reshaped({1, num_classes});
  const Tensor dpooled =
      LinearBackward(seg.head, cache.pooled, dlogits, &grads->head);
  const size_t n = cache.final_norm.normalized.rows();
  const size_t d = dpooled.cols();
  Tensor dz = Tensor::Matrix(n, d);
  for (size_t r = 0; r < n; ++r) {
    for (size_t c = 0; c < d; ++c) dz(r, c) = dpooled(0, c) / static_cast<double>(n);
  }
  Tensor dh = LayerNormBackward(seg.final_norm, cache.final_norm, dz,
                                &grads->final_norm);
  for (size_t b = seg.blocks.size(); b-- > 0;) {
    dh = BlockBackward(seg.blocks[b], seg.num_heads, cache.blocks[b], dh,
                       &grads->blocks[b]);
  }
  return dh;
}

double SoftCrossEntropy(const Tensor& logits, const Tensor& target,
                        Tensor* grad_logits) {
  if (logits.size() != target.size()) {
    ThrowShape("SoftCrossEntropy: logits and target lengths differ");
  }
  const auto z = logits.data();
  const double max = *std::max_element(z.begin(), z.end());
  double sum_exp = 0.0;
  for (double v : z) sum_exp += std::exp(v - max);
  const double log_sum_exp = max + std::log(sum_exp);
  double loss = 0.0, target_mass = 0.0;
  for (size_t k = 0; k < z.size(); ++k) {
    loss -= target[k] * (z[k] - log_sum_exp);
    target_mass += target[k];
  }
  if (grad_logits) {
    *grad_logits = Tensor(logits.shape());
    for (size_t k = 0; k < z.size(); ++k) {
      (*grad_logits)[k] = std::exp(z[k] - log_sum_exp) * target_mass - target[k];
    }
  }
  return loss;
}

int Argmax(const Tensor& v) {
  const auto d = v.data();
  return static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin());
}

Tensor RouteCutGradient(const MixedBatchItem& item, size_t contributor,
                        const Tensor& grad_input) {
  const Contributor& c = item.contributors.at(contributor);
  if (item.kind == MixKind::kMixup) {
    Tensor out = grad_input;
    ScaleInPlace(out, c.lambda);
    return out;
  }
  if (c.mask.num_patches != static_cast<int>(grad_input.rows())) {
    ThrowShape("RouteCutGradient: mask does not match gradient rows");
  }
  Tensor out(grad_input.shape());
  for (int p : c.mask.selected) {
    auto src = grad_input.row(p);
    std::copy(src.begin(), src.end(), out.row(p).begin());
  }
  return out;
}

ServerPass BackwardAndCutGradients(const UpperSegment& seg,
                                   std::span<const MixedBatchItem> items,
                                   std::span<const UpperCache> caches,
                                   double item_weight) {
  if (caches.size() != items.size()) {
    ThrowState("BackwardAndCutGradients: " + std::to_string(items.size()) +
               " items but " + std::to_string(caches.size()) + " caches");
  }
  ServerPass pass;
  pass.upper_grads = ZerosLike(seg);
  pass.cut_grads.resize(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    if (!caches[i].valid) {
      ThrowState("BackwardAndCutGradients: item " + std::to_string(i) +
                 " has no forward cache");
    }
    Tensor dlogits;
    pass.loss +=
        item_weight * SoftCrossEntropy(caches[i].logits, items[i].label, &dlogits);
    ScaleInPlace(dlogits, item_weight);
    const Tensor dinput = UpperBackward(seg, caches[i], dlogits, &pass.upper_grads);
    for (size_t c = 0; c < items[i].contributors.size(); ++c) {
      pass.cut_grads[i].push_back(RouteCutGradient(items[i], c, dinput));
    }
  }
  return pass;
}

ServerPass ServerForwardBackward(const UpperSegment& seg,
                                 std::span<const MixedBatchItem> items,
                                 double item_weight) {
  std::vector<UpperCache> caches(items.size());
  for (size_t i = 0; i < items.size(); ++i) {
    UpperForward(seg, items[i].smashed.patches, &caches[i]);
  }
  return BackwardAndCutGradients(seg, items, caches, item_weight);
}

void SgdStep(LowerSegment& seg, const LowerSegment& grads, double lr) {
  SgdStepImpl(seg, grads, lr);
}

void SgdStep(UpperSegment& seg, const UpperSegment& grads, double lr) {
  SgdStepImpl(seg, grads, lr);
}

std::vector<uint8_t> SerializeParams(const LowerSegment& seg) {
  return SerializeImpl(seg);
}
std::vector<uint8_t> SerializeParams(const UpperSegment& seg) {
  return SerializeImpl(seg);
}
void DeserializeParams(std::span<const uint8_t> bytes, LowerSegment* seg) {
  DeserializeImpl(bytes, seg);
}
void DeserializeParams(std::span<const uint8_t> bytes, UpperSegment* seg) {
  DeserializeImpl(bytes, seg);
}

}  // namespace splitmix
