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

// A small vision transformer cut right after the patch embedding.
//
// Lower segment (one per client): patchify an H×W×C image into N rows of
// P²·C pixels, embed linearly to d dimensions and add learned positions.
// Upper segment (server): B pre-norm encoder blocks (multi-head
// self-attention + GELU MLP, residual), a final LayerNorm, mean pooling over
// patches and a linear head. There is no class token, so every row of the
// cut-layer activation belongs to exactly one patch.
//
// Backward passes are written out per layer; forward calls fill a cache that
// the matching backward call consumes.

#ifndef SPLITMIX_SPLIT_VIT_H_
#define SPLITMIX_SPLIT_VIT_H_

#include <concepts>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "splitmix/interpolation.h"
#include "splitmix/rng.h"
#include "splitmix/tensor.h"

namespace splitmix {

struct ModelConfig {
  int image_height = 16;
  int image_width = 16;
  int channels = 1;
  int patch_size = 4;
  int embed_dim = 32;
  int num_blocks = 2;
  int num_heads = 2;
  int mlp_ratio = 2;
  int num_classes = 4;
  double init_std = 0.02;

  int grid_h() const { return image_height / patch_size; }
  int grid_w() const { return image_width / patch_size; }
  int num_patches() const { return grid_h() * grid_w(); }
  int patch_dim() const { return patch_size * patch_size * channels; }
  void Validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct Linear {
  Tensor weight;  // in × out
  Tensor bias;    // out
};

struct LayerNorm {
  Tensor gamma;
  Tensor beta;
};

struct EncoderBlock {
  LayerNorm norm1;
  Linear query, key, value, proj;
  LayerNorm norm2;
  Linear fc1, fc2;
};

struct LowerSegment {
  int patch_size = 0;
  int channels = 0;
  Linear embed;      // (P²C) × d
  Tensor positions;  // N × d
};

struct UpperSegment {
  int num_heads = 1;
  std::vector<EncoderBlock> blocks;
  LayerNorm final_norm;
  Linear head;  // d × L
};

// Weights and positions ~ N(0, init_std²), biases 0, LayerNorm γ=1 β=0.
LowerSegment InitLowerSegment(const ModelConfig& config, SeededRng& rng);
UpperSegment InitUpperSegment(const ModelConfig& config, SeededRng& rng);
LowerSegment ZerosLike(const LowerSegment& seg);
UpperSegment ZerosLike(const UpperSegment& seg);

// Visits (name, tensor) for every trainable parameter in a fixed order.
template <typename Seg, typename F>
  requires std::same_as<std::remove_const_t<Seg>, LowerSegment>
void ForEachParam(Seg& seg, F&& fn) {
  fn(std::string("embed.weight"), seg.embed.weight);
  fn(std::string("embed.bias"), seg.embed.bias);
  fn(std::string("positions"), seg.positions);
}

template <typename Seg, typename F>
  requires std::same_as<std::remove_const_t<Seg>, UpperSegment>
void ForEachParam(Seg& seg, F&& fn) {
  for (size_t b = 0; b < seg.blocks.size(); ++b) {
    auto& blk = seg.blocks[b];
    const std::string p = "block" + std::to_string(b) + ".";
    fn(p + "norm1.gamma", blk.norm1.gamma);
    fn(p + "norm1.beta", blk.norm1.beta);
    fn(p + "query.weight", blk.query.weight);
    fn(p + "query.bias", blk.query.bias);
    fn(p + "key.weight", blk.key.weight);
    fn(p + "key.bias", blk.key.bias);
    fn(p + "value.weight", blk.value.weight);
    fn(p + "value.bias", blk.value.bias);
    fn(p + "proj.weight", blk.proj.weight);
    fn(p + "proj.bias", blk.proj.bias);
    fn(p + "norm2.gamma", blk.norm2.gamma);
    fn(p + "norm2.beta", blk.norm2.beta);
    fn(p + "fc1.weight", blk.fc1.weight);
    fn(p + "fc1.bias", blk.fc1.bias);
    fn(p + "fc2.weight", blk.fc2.weight);
    fn(p + "fc2.bias", blk.fc2.bias);
  }
  fn(std::string("final_norm.gamma"), seg.final_norm.gamma);
  fn(std::string("final_norm.beta"), seg.final_norm.beta);
  fn(std::string("head.weight"), seg.head.weight);
  fn(std::string("head.bias"), seg.head.bias);
}

// H×W×C image -> N × (P²C) rows, patches in row-major grid order and pixels
// within a patch ordered (row, column, channel).
Tensor Patchify(const Tensor& image, int patch_size);
Tensor Unpatchify(const Tensor& patches, int height, int width, int channels,
                  int patch_size);

struct LowerCache {
  bool valid = false;
  Tensor patches;
};

// Returns the N × d cut-layer activation (before any clamping).
Tensor LowerForward(const LowerSegment& seg, const Tensor& image,
                    LowerCache* cache = nullptr);
// Accumulates parameter gradients into *grads.
void LowerBackward(const LowerSegment& seg, const LowerCache& cache,
                   const Tensor& grad_smashed, LowerSegment* grads);

struct LayerNormCache {
  Tensor normalized;
  std::vector<double> inv_std;
};

struct BlockCache {
  Tensor input;
  LayerNormCache norm1;
  Tensor norm1_out;
  Tensor q, k, v;
  std::vector<Tensor> probs;  // One N × N matrix per head.
  Tensor attn_concat;
  Tensor residual;
  LayerNormCache norm2;
  Tensor norm2_out;
  Tensor fc1_pre;
  Tensor fc1_act;
};

struct UpperCache {
  bool valid = false;
  std::vector<BlockCache> blocks;
  LayerNormCache final_norm;
  Tensor pooled;  // 1 × d
  Tensor logits;  // L
};

// x is N × d; returns logits of length L.
Tensor UpperForward(const UpperSegment& seg, const Tensor& x,
                    UpperCache* cache = nullptr);
// Accumulates into *grads and returns ∂/∂x. Throws a state error when the
// cache was not filled by UpperForward.
Tensor UpperBackward(const UpperSegment& seg, const UpperCache& cache,
                     const Tensor& grad_logits, UpperSegment* grads);

// −Σ_k t_k log softmax(z)_k in log-space. The gradient is
// softmax(z)·Σt − t, so targets need not sum to one.
double SoftCrossEntropy(const Tensor& logits, const Tensor& target,
                        Tensor* grad_logits = nullptr);

int Argmax(const Tensor& v);

struct ServerPass {
  double loss = 0.0;  // Σ item_weight · loss(item)
  UpperSegment upper_grads;
  // cut_grads[i][c]: gradient for contributor c of item i, routed through
  // the mixing operator (mask rows for CutMix, λ for Mixup).
  std::vector<std::vector<Tensor>> cut_grads;
};

// Backward over a set of forwarded mixed items. caches[i] must come from
// UpperForward on items[i].smashed.
ServerPass BackwardAndCutGradients(const UpperSegment& seg,
                                   std::span<const MixedBatchItem> items,
                                   std::span<const UpperCache> caches,
                                   double item_weight);

// Forward + backward in one call.
ServerPass ServerForwardBackward(const UpperSegment& seg,
                                 std::span<const MixedBatchItem> items,
                                 double item_weight);

// Gradient w.r.t. one contributor's upload given ∂L/∂(mixed input).
Tensor RouteCutGradient(const MixedBatchItem& item, size_t contributor,
                        const Tensor& grad_input);

// p <- p - lr * g for every parameter.
void SgdStep(LowerSegment& seg, const LowerSegment& grads, double lr);
void SgdStep(UpperSegment& seg, const UpperSegment& grads, double lr);

// Flat (name, shape, little-endian f64 values) records.
std::vector<uint8_t> SerializeParams(const LowerSegment& seg);
std::vector<uint8_t> SerializeParams(const UpperSegment& seg);
// Overwrites parameters in place; names and shapes must match.
void DeserializeParams(std::span<const uint8_t> bytes, LowerSegment* seg);
void DeserializeParams(std::span<const uint8_t> bytes, UpperSegment* seg);

}  // namespace splitmix

#endif  // SPLITMIX_SPLIT_VIT_H_
