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

#include <cstdio>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "splitmix/error.h"

namespace splitmix {
namespace {

ErrorCode CodeOf(const std::string& json) {
  try {
    ParseConfig(json);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kInternal;
}

TEST(ModeTest, NamesRoundTrip) {
  for (Mode m : AllModes()) EXPECT_EQ(ParseMode(ModeName(m)), m);
  EXPECT_EQ(ModeName(Mode::kDpCutMixSl), "dp_cutmixsl");
  EXPECT_EQ(ModeName(Mode::kPlainSl), "plain_sl");
  EXPECT_THROW(ParseMode("cutmix"), Error);
}

TEST(ModeTest, Capabilities) {
  EXPECT_FALSE(ModeAddsNoise(Mode::kPlainSl));
  EXPECT_TRUE(ModeAddsNoise(Mode::kDpMixSl));
  EXPECT_FALSE(ModeUsesServer(Mode::kStandalone));
  EXPECT_TRUE(ModeUsesMixer(Mode::kDpCutMixSl));
  EXPECT_FALSE(ModeUsesMixer(Mode::kDpSl));
}

TEST(ConfigTest, EmptyObjectGivesDefaults) {
  EXPECT_EQ(ParseConfig("{}"), ExperimentConfig{});
}

TEST(ConfigTest, JsonRoundTrip) {
  ExperimentConfig c;
  c.mode = Mode::kVanillaCutMix;
  c.num_clients = 6;
  c.group_size = 3;
  c.lambda.mode = LambdaMode::kDirichlet;
  c.lambda.concentration = 0.5;
  c.privacy.sigma_s = 0.3;
  c.model.embed_dim = 16;
  c.attack.train_fractions = {0.25, 0.5};
  c.seed = 0xFFFFFFFFFFFFull;
  c.output_dir = "out dir";
  EXPECT_EQ(ParseConfig(ConfigToJson(c)), c);
}

TEST(ConfigTest, PartialOverride) {
  const ExperimentConfig c = ParseConfig(
      R"({"mode": "dp_mixsl", "privacy": {"sigma_s": 2.5}, "model": {"num_classes": 3}})");
  EXPECT_EQ(c.mode, Mode::kDpMixSl);
  EXPECT_EQ(c.privacy.sigma_s, 2.5);
  EXPECT_EQ(c.privacy.sigma_y, 1.0);
  EXPECT_EQ(c.model.num_classes, 3);
}

TEST(ConfigTest, ErrorsAreConfigErrors) {
  EXPECT_EQ(CodeOf("{not json"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"bogus": 1})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"privacy": {"sigma": 1}})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"num_clients": "ten"})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"num_clients": 2.5})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"mode": "nope"})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"num_clients": 4, "group_size": 5})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"privacy": {"sigma_s": -1}})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"model": {"patch_size": 5}})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"lambda_mode": "zipf"})"), ErrorCode::kConfig);
  EXPECT_EQ(CodeOf(R"({"mode": "standalone", "fedavg_lower": true})"),
            ErrorCode::kConfig);
  EXPECT_EQ(CodeOf("[]"), ErrorCode::kConfig);
}

TEST(ConfigTest, LoadFromFile) {
  const std::string path = ::testing::TempDir() + "config_test.json";
  {
    std::ofstream out(path);
    out << R"({"epochs": 3})";
  }
  EXPECT_EQ(LoadConfig(path).epochs, 3);
  std::remove(path.c_str());
  try {
    LoadConfig(path);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

}  // namespace
}  // namespace splitmix
