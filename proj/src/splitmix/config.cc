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

#include "splitmix/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "splitmix/error.h"

namespace splitmix {
namespace {

using Json = nlohmann::ordered_json;

struct ModeEntry {
  Mode mode;
  const char* name;
};

constexpr ModeEntry kModes[] = {
    {Mode::kPlainSl, "plain_sl"},
    {Mode::kDpSl, "dp_sl"},
    {Mode::kDpMixSl, "dp_mixsl"},
    {Mode::kDpCutMixSl, "dp_cutmixsl"},
    {Mode::kVanillaCutMix, "vanilla_cutmix"},
    {Mode::kStandalone, "standalone"},
    {Mode::kStandaloneCutout, "standalone_cutout"},
};

// Reads fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const Json& obj, std::string where)
      : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) ThrowConfig(where_ + ": expected a JSON object");
  }

  const Json* Find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void Int(const std::string& key, int* out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number_integer()) Fail(key, "an integer");
      const int64_t x = v->get<int64_t>();
      if (x < INT32_MIN || x > INT32_MAX) Fail(key, "a 32-bit integer");
      *out = static_cast<int>(x);
    }
  }

  void Int64(const std::string& key, int64_t* out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number_integer()) Fail(key, "an integer");
      *out = v->get<int64_t>();
    }
  }

  void Uint64(const std::string& key, uint64_t* out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number_unsigned()) Fail(key, "a nonnegative integer");
      *out = v->get<uint64_t>();
    }
  }

  void Double(const std::string& key, double* out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number()) Fail(key, "a number");
      *out = v->get<double>();
    }
  }

  void Bool(const std::string& key, bool* out) {
    if (const Json* v = Find(key)) {
      if (!v->is_boolean()) Fail(key, "a boolean");
      *out = v->get<bool>();
    }
  }

  void String(const std::string& key, std::string* out) {
    if (const Json* v = Find(key)) {
      if (!v->is_string()) Fail(key, "a string");
      *out = v->get<std::string>();
    }
  }

  void DoubleList(const std::string& key, std::vector<double>* out) {
    if (const Json* v = Find(key)) {
      if (!v->is_array()) Fail(key, "an array of numbers");
      out->clear();
      for (const auto& e : *v) {
        if (!e.is_number()) Fail(key, "an array of numbers");
        out->push_back(e.get<double>());
      }
    }
  }

  void Finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) {
        ThrowConfig(where_ + ": unknown key '" + it.key() + "'");
      }
    }
  }

 private:
  [[noreturn]] void Fail(const std::string& key, const std::string& what) const {
    ThrowConfig(where_ + "." + key + " must be " + what);
  }

  const Json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

void Require(bool ok, const std::string& message) {
  if (!ok) ThrowConfig(message);
}

}  // namespace

std::string ModeName(Mode mode) {
  for (const auto& e : kModes) {
    if (e.mode == mode) return e.name;
  }
  ThrowInternal("unnamed mode");
}

Mode ParseMode(const std::string& name) {
  for (const auto& e : kModes) {
    if (name == e.name) return e.mode;
  }
  ThrowConfig("unknown mode '" + name + "'");
}

std::vector<Mode> AllModes() {
  std::vector<Mode> out;
  for (const auto& e : kModes) out.push_back(e.mode);
  return out;
}

bool ModeUsesServer(Mode mode) {
  return mode != Mode::kStandalone && mode != Mode::kStandaloneCutout;
}

bool ModeUsesMixer(Mode mode) {
  return mode == Mode::kDpMixSl || mode == Mode::kDpCutMixSl ||
         mode == Mode::kVanillaCutMix;
}

bool ModeAddsNoise(Mode mode) {
  return ModeUsesServer(mode) && mode != Mode::kPlainSl;
}

void ExperimentConfig::Validate() const {
  Require(num_clients >= 1, "num_clients must be >= 1");
  Require(group_size >= 1 && group_size <= num_clients,
          "group_size must lie in [1, num_clients]");
  Require(group_size <= 255, "group_size must be <= 255");
  Require(num_clients <= 0xFFF0, "num_clients too large for 16-bit role ids");
  if (lambda.mode == LambdaMode::kDirichlet) {
    Require(lambda.concentration > 0.0 && std::isfinite(lambda.concentration),
            "dirichlet_concentration must be > 0");
  }
  Require(!(fedavg_lower && !ModeUsesServer(mode)),
          "fedavg_lower requires a mode with a server");
  Require(epochs >= 0, "epochs must be >= 0");
  Require(max_rounds >= 0, "max_rounds must be >= 0");
  Require(learning_rate > 0.0 && std::isfinite(learning_rate),
          "learning_rate must be > 0");
  Require(batch_size >= 1, "batch_size must be >= 1");
  try {
    privacy.Validate();
    model.Validate();
  } catch (const Error& e) {
    ThrowConfig(e.what());
  }
  Require(model.num_patches() <= 0xFFFF, "too many patches for the wire format");
  Require(dataset.kind == "synthetic" || dataset.kind == "binary",
          "dataset.kind must be 'synthetic' or 'binary'");
  if (dataset.kind == "synthetic") {
    Require(dataset.train_count >= model.num_classes,
            "dataset.train_count must be >= num_classes");
    Require(dataset.test_count >= 1, "dataset.test_count must be >= 1");
    Require(dataset.noise_std >= 0.0, "dataset.noise_std must be >= 0");
  } else {
    Require(!dataset.path.empty(), "dataset.path is required for binary data");
    Require(dataset.test_fraction > 0.0 && dataset.test_fraction < 1.0,
            "dataset.test_fraction must lie in (0, 1)");
  }
  Require(attack.pretrain_epochs >= 0 && attack.epochs >= 0,
          "attack epochs must be >= 0");
  Require(attack.train_count >= 1 && attack.test_count >= 1,
          "attack sample counts must be >= 1");
  Require(attack.learning_rate > 0.0, "attack.learning_rate must be > 0");
  Require(attack.batch_size >= 1, "attack.batch_size must be >= 1");
  Require(attack.hidden_channels >= 1, "attack.hidden_channels must be >= 1");
  Require(attack.upsample >= 1 && model.patch_size % attack.upsample == 0,
          "attack.upsample must divide the patch size");
  Require(attack.group_size >= 2 && attack.group_size <= 255,
          "attack.group_size must lie in [2, 255]");
  Require(attack.num_seeds >= 1, "attack.num_seeds must be >= 1");
  Require(!attack.train_fractions.empty(), "attack.train_fractions is empty");
  for (double f : attack.train_fractions) {
    Require(f > 0.0 && f <= 1.0, "attack.train_fractions must lie in (0, 1]");
  }
  Require(!output_dir.empty(), "output_dir must not be empty");
}

ExperimentConfig ParseConfig(const std::string& json_text) {
  Json root;
  try {
    root = Json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    ThrowConfig(std::string("config is not valid JSON: ") + e.what());
  }
  ExperimentConfig c;
  ObjectReader r(root, "config");

  std::string mode = ModeName(c.mode);
  r.String("mode", &mode);
  c.mode = ParseMode(mode);
  r.Int("num_clients", &c.num_clients);
  r.Int("group_size", &c.group_size);
  std::string lambda_mode =
      c.lambda.mode == LambdaMode::kUniform ? "uniform" : "dirichlet";
  r.String("lambda_mode", &lambda_mode);
  if (lambda_mode == "uniform") {
    c.lambda.mode = LambdaMode::kUniform;
  } else if (lambda_mode == "dirichlet") {
    c.lambda.mode = LambdaMode::kDirichlet;
  } else {
    ThrowConfig("lambda_mode must be 'uniform' or 'dirichlet'");
  }
  r.Double("dirichlet_concentration", &c.lambda.concentration);
  r.Bool("fedavg_lower", &c.fedavg_lower);
  r.Int("epochs", &c.epochs);
  r.Int("max_rounds", &c.max_rounds);
  r.Double("learning_rate", &c.learning_rate);
  r.Int("batch_size", &c.batch_size);
  r.Uint64("seed", &c.seed);
  r.String("output_dir", &c.output_dir);

  if (const Json* p = r.Find("privacy")) {
    ObjectReader pr(*p, "privacy");
    pr.Double("delta_bound", &c.privacy.delta_bound);
    pr.Double("sigma_s", &c.privacy.sigma_s);
    pr.Double("sigma_y", &c.privacy.sigma_y);
    pr.Int64("d_s", &c.privacy.d_s);
    pr.Int64("d_y", &c.privacy.d_y);
    pr.Double("alpha", &c.privacy.alpha);
    pr.Finish();
  }
  if (const Json* m = r.Find("model")) {
    ObjectReader mr(*m, "model");
    mr.Int("image_height", &c.model.image_height);
    mr.Int("image_width", &c.model.image_width);
    mr.Int("channels", &c.model.channels);
    mr.Int("patch_size", &c.model.patch_size);
    mr.Int("embed_dim", &c.model.embed_dim);
    mr.Int("num_blocks", &c.model.num_blocks);
    mr.Int("num_heads", &c.model.num_heads);
    mr.Int("mlp_ratio", &c.model.mlp_ratio);
    mr.Int("num_classes", &c.model.num_classes);
    mr.Double("init_std", &c.model.init_std);
    mr.Finish();
  }
  if (const Json* d = r.Find("dataset")) {
    ObjectReader dr(*d, "dataset");
    dr.String("kind", &c.dataset.kind);
    dr.Int("train_count", &c.dataset.train_count);
    dr.Int("test_count", &c.dataset.test_count);
    dr.Double("noise_std", &c.dataset.noise_std);
    dr.String("path", &c.dataset.path);
    dr.Double("test_fraction", &c.dataset.test_fraction);
    dr.Finish();
  }
  if (const Json* a = r.Find("attack")) {
    ObjectReader ar(*a, "attack");
    ar.Int("pretrain_epochs", &c.attack.pretrain_epochs);
    ar.Int("train_count", &c.attack.train_count);
    ar.Int("test_count", &c.attack.test_count);
    ar.Int("epochs", &c.attack.epochs);
    ar.Double("learning_rate", &c.attack.learning_rate);
    ar.Int("batch_size", &c.attack.batch_size);
    ar.Int("hidden_channels", &c.attack.hidden_channels);
    ar.Int("upsample", &c.attack.upsample);
    ar.Int("group_size", &c.attack.group_size);
    ar.Int("num_seeds", &c.attack.num_seeds);
    ar.DoubleList("train_fractions", &c.attack.train_fractions);
    ar.Finish();
  }
  r.Finish();
  c.Validate();
  return c;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) ThrowConfig("cannot open config file '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return ParseConfig(text.str());
}

std::string ConfigToJson(const ExperimentConfig& c) {
  Json j;
  j["mode"] = ModeName(c.mode);
  j["num_clients"] = c.num_clients;
  j["group_size"] = c.group_size;
  j["lambda_mode"] =
      c.lambda.mode == LambdaMode::kUniform ? "uniform" : "dirichlet";
  j["dirichlet_concentration"] = c.lambda.concentration;
  j["fedavg_lower"] = c.fedavg_lower;
  j["epochs"] = c.epochs;
  j["max_rounds"] = c.max_rounds;
  j["learning_rate"] = c.learning_rate;
  j["batch_size"] = c.batch_size;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  j["privacy"] = {{"delta_bound", c.privacy.delta_bound},
                  {"sigma_s", c.privacy.sigma_s},
                  {"sigma_y", c.privacy.sigma_y},
                  {"d_s", c.privacy.d_s},
                  {"d_y", c.privacy.d_y},
                  {"alpha", c.privacy.alpha}};
  j["model"] = {{"image_height", c.model.image_height},
                {"image_width", c.model.image_width},
                {"channels", c.model.channels},
                {"patch_size", c.model.patch_size},
                {"embed_dim", c.model.embed_dim},
                {"num_blocks", c.model.num_blocks},
                {"num_heads", c.model.num_heads},
                {"mlp_ratio", c.model.mlp_ratio},
                {"num_classes", c.model.num_classes},
                {"init_std", c.model.init_std}};
  j["dataset"] = {{"kind", c.dataset.kind},
                  {"train_count", c.dataset.train_count},
                  {"test_count", c.dataset.test_count},
                  {"noise_std", c.dataset.noise_std},
                  {"path", c.dataset.path},
                  {"test_fraction", c.dataset.test_fraction}};
  j["attack"] = {{"pretrain_epochs", c.attack.pretrain_epochs},
                 {"train_count", c.attack.train_count},
                 {"test_count", c.attack.test_count},
                 {"epochs", c.attack.epochs},
                 {"learning_rate", c.attack.learning_rate},
                 {"batch_size", c.attack.batch_size},
                 {"hidden_channels", c.attack.hidden_channels},
                 {"upsample", c.attack.upsample},
                 {"group_size", c.attack.group_size},
                 {"num_seeds", c.attack.num_seeds},
                 {"train_fractions", c.attack.train_fractions}};
  return j.dump(2);
}

}  // namespace splitmix
