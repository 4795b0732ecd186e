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

#include "splitmix/dataset.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>
#include <numeric>

#include "splitmix/bytes.h"
#include "splitmix/error.h"

namespace splitmix {
namespace {

// Seeded-stream id for the dataset; kept apart from model and protocol
// streams.
constexpr uint64_t kDatasetStream = 3;

std::vector<uint8_t> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowIo("cannot open '" + path + "'");
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in), {});
}

void WriteFile(const std::string& path, std::span<const uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowIo("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) ThrowIo("write failed for '" + path + "'");
}

uint8_t ToByte(double v) {
  return static_cast<uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

Dataset Subset(const Dataset& src, std::span<const size_t> indices) {
  Dataset out;
  out.height = src.height;
  out.width = src.width;
  out.channels = src.channels;
  out.num_classes = src.num_classes;
  for (size_t i : indices) {
    out.images.push_back(src.images[i]);
    out.labels.push_back(src.labels[i]);
  }
  return out;
}

}  // namespace

void Dataset::Validate() const {
  if (images.size() != labels.size()) ThrowShape("dataset: image/label counts differ");
  const std::vector<size_t> shape = {static_cast<size_t>(height),
                                     static_cast<size_t>(width),
                                     static_cast<size_t>(channels)};
  for (size_t i = 0; i < images.size(); ++i) {
    if (images[i].shape() != shape) ThrowShape("dataset: image shape mismatch");
    for (double v : images[i].data()) {
      if (!(v >= 0.0 && v <= 1.0)) ThrowParameter("dataset: pixel outside [0, 1]");
    }
    if (labels[i] < 0 || labels[i] >= num_classes) {
      ThrowParameter("dataset: label " + std::to_string(labels[i]) +
                     " outside [0, " + std::to_string(num_classes) + ")");
    }
  }
}

Dataset GenerateSynthetic(SeededRng& rng, int num_classes, int count,
                          int height, int width, int channels,
                          double noise_std) {
  if (num_classes < 1 || count < num_classes || height < 1 || width < 1 ||
      channels < 1 || !(noise_std >= 0.0)) {
    ThrowParameter("GenerateSynthetic: invalid arguments");
  }
  Dataset data;
  data.height = height;
  data.width = width;
  data.channels = channels;
  data.num_classes = num_classes;
  std::vector<int> labels(count);
  for (int i = 0; i < count; ++i) labels[i] = i % num_classes;
  rng.Shuffle(std::span<int>(labels));

  const double two_pi = 2.0 * std::numbers::pi;
  for (int i = 0; i < count; ++i) {
    const int k = labels[i];
    const double angle = std::numbers::pi * k / num_classes;
    const double cycles = (k % 2 == 0) ? 2.0 : 3.0;
    const double phase = (rng.NextUniform() - 0.5) * (std::numbers::pi / 2.0);
    const double amplitude = 0.3 + 0.1 * rng.NextUniform();
    Tensor img({static_cast<size_t>(height), static_cast<size_t>(width),
                static_cast<size_t>(channels)});
    for (int y = 0; y < height; ++y) {
      for (int x = 0; x < width; ++x) {
        const double u = (x * std::cos(angle) + y * std::sin(angle)) / width;
        const double base = 0.5 + amplitude * std::sin(two_pi * cycles * u + phase);
        for (int c = 0; c < channels; ++c) {
          const double scale = 1.0 - 0.2 * c / channels;
          const double v = base * scale + noise_std * rng.NextGaussian();
          img[(static_cast<size_t>(y) * width + x) * channels + c] =
              std::clamp(v, 0.0, 1.0);
        }
      }
    }
    data.images.push_back(std::move(img));
    data.labels.push_back(k);
  }
  return data;
}

Dataset LoadBinaryDataset(const std::string& path, int num_classes) {
  const std::vector<uint8_t> bytes = ReadFile(path);
  ByteReader r(bytes);
  Dataset data;
  uint32_t count = 0;
  try {
    count = r.U32();
    data.height = static_cast<int>(r.U32());
    data.width = static_cast<int>(r.U32());
    data.channels = static_cast<int>(r.U32());
  } catch (const Error&) {
    ThrowIo("'" + path + "': truncated header");
  }
  data.num_classes = num_classes;
  const size_t pixels =
      static_cast<size_t>(data.height) * data.width * data.channels;
  if (pixels == 0 || r.remaining() != count * (pixels + 1)) {
    ThrowIo("'" + path + "': expected " + std::to_string(count * (pixels + 1)) +
            " bytes after the header, found " + std::to_string(r.remaining()));
  }
  auto raw = r.Bytes(count * pixels);
  auto labels = r.Bytes(count);
  for (uint32_t i = 0; i < count; ++i) {
    Tensor img({static_cast<size_t>(data.height), static_cast<size_t>(data.width),
                static_cast<size_t>(data.channels)});
    for (size_t p = 0; p < pixels; ++p) img[p] = raw[i * pixels + p] / 255.0;
    data.images.push_back(std::move(img));
    data.labels.push_back(labels[i]);
  }
  data.Validate();
  return data;
}

void SaveBinaryDataset(const std::string& path, const Dataset& data) {
  data.Validate();
  ByteWriter w;
  w.U32(static_cast<uint32_t>(data.size()));
  w.U32(data.height);
  w.U32(data.width);
  w.U32(data.channels);
  for (const Tensor& img : data.images) {
    for (double v : img.data()) w.U8(ToByte(v));
  }
  for (int label : data.labels) w.U8(static_cast<uint8_t>(label));
  WriteFile(path, w.Take());
}

DataSplit MakeDataSplit(const ExperimentConfig& config) {
  const ModelConfig& m = config.model;
  SeededRng rng(config.seed, kDatasetStream);
  DataSplit split;
  if (config.dataset.kind == "synthetic") {
    Dataset all = GenerateSynthetic(
        rng, m.num_classes, config.dataset.train_count + config.dataset.test_count,
        m.image_height, m.image_width, m.channels, config.dataset.noise_std);
    std::vector<size_t> train(config.dataset.train_count);
    std::iota(train.begin(), train.end(), 0);
    std::vector<size_t> test(config.dataset.test_count);
    std::iota(test.begin(), test.end(), train.size());
    split.train = Subset(all, train);
    split.test = Subset(all, test);
  } else {
    Dataset all = LoadBinaryDataset(config.dataset.path, m.num_classes);
    if (all.height != m.image_height || all.width != m.image_width ||
        all.channels != m.channels) {
      ThrowConfig("binary dataset geometry does not match the model config");
    }
    std::vector<size_t> order(all.size());
    std::iota(order.begin(), order.end(), 0);
    rng.Shuffle(std::span<size_t>(order));
    const size_t test_count = std::max<size_t>(
        1, static_cast<size_t>(std::floor(config.dataset.test_fraction * all.size())));
    if (test_count >= all.size()) ThrowConfig("binary dataset too small to split");
    const size_t cut = all.size() - test_count;
    split.train = Subset(all, std::span(order).first(cut));
    split.test = Subset(all, std::span(order).subspan(cut));
  }
  return split;
}

void WritePgm(const std::string& path, const Tensor& gray) {
  if (gray.rank() != 2) ThrowShape("WritePgm: expected an H × W tensor");
  const std::string header = "P5\n" + std::to_string(gray.cols()) + " " +
                             std::to_string(gray.rows()) + "\n255\n";
  std::vector<uint8_t> bytes(header.begin(), header.end());
  for (double v : gray.data()) bytes.push_back(ToByte(v));
  WriteFile(path, bytes);
}

Tensor ReadPgm(const std::string& path) {
  const std::vector<uint8_t> bytes = ReadFile(path);
  size_t pos = 0;
  auto token = [&]() {
    while (pos < bytes.size() && std::isspace(bytes[pos])) ++pos;
    std::string out;
    while (pos < bytes.size() && !std::isspace(bytes[pos])) out += static_cast<char>(bytes[pos++]);
    return out;
  };
  if (token() != "P5") ThrowIo("'" + path + "' is not a binary graymap");
  const size_t w = std::stoul(token());
  const size_t h = std::stoul(token());
  if (token() != "255") ThrowIo("'" + path + "': unsupported maxval");
  ++pos;  // Single whitespace after maxval.
  if (bytes.size() - pos != w * h) ThrowIo("'" + path + "': wrong pixel count");
  Tensor out = Tensor::Matrix(h, w);
  for (size_t i = 0; i < w * h; ++i) out[i] = bytes[pos + i] / 255.0;
  return out;
}

}  // namespace splitmix
