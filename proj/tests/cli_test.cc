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

// Runs the splitmix binary as a subprocess.

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

namespace {

namespace fs = std::filesystem;

struct Result {
  int exit_code = -1;
  std::string out;
};

Result RunCli(const std::string& args, const std::string& env = "") {
  const std::string cmd =
      env + " " + SPLITMIX_CLI_PATH + " " + args + " 2>/dev/null";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  char buf[4096];
  size_t n;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Value of a numeric member in a flat JSON object.
double JsonNumber(const std::string& json, const std::string& key) {
  const size_t at = json.find("\"" + key + "\":");
  if (at == std::string::npos) return -1.0;
  return std::stod(json.substr(at + key.size() + 3));
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::path(::testing::TempDir()) /
           ("cli_test_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }

  std::string WriteConfig(const std::string& json) {
    const fs::path p = dir_ / "config.json";
    std::ofstream(p) << json;
    return p.string();
  }

  std::string SmallConfig(const std::string& out) {
    return WriteConfig(R"({"num_clients": 4, "group_size": 4, "epochs": 1,
      "dataset": {"train_count": 32, "test_count": 8}, "output_dir": ")" +
                       (dir_ / out).string() + "\"}");
  }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli("").exit_code, 2);
  EXPECT_EQ(RunCli("run").exit_code, 2);
  EXPECT_EQ(RunCli("frobnicate --config x").exit_code, 2);
  EXPECT_EQ(RunCli("--help").exit_code, 0);
}

TEST_F(CliTest, InvalidConfigsExitTwo) {
  EXPECT_EQ(RunCli("run --config " + (dir_ / "missing.json").string()).exit_code, 2);
  EXPECT_EQ(RunCli("run --config " + WriteConfig("{oops")).exit_code, 2);
  EXPECT_EQ(RunCli("run --config " + WriteConfig(R"({"learning_rate": -1})")).exit_code, 2);
  EXPECT_EQ(RunCli("rdp --config " + WriteConfig(R"({"extra": 1})")).exit_code, 2);
  const std::string ok = SmallConfig("x");
  EXPECT_EQ(RunCli("sweep --config " + ok + " --axis lr --values 1").exit_code, 2);
  EXPECT_EQ(RunCli("sweep --config " + ok + " --axis group_size --values 9").exit_code, 2);
  EXPECT_EQ(RunCli("rdp --config " + ok, "SPLITMIX_SEED=abc").exit_code, 2);
}

TEST_F(CliTest, RdpPrintsBudgets) {
  const Result r = RunCli("rdp --config " + WriteConfig("{}"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NEAR(JsonNumber(r.out, "eps_o"), 10.8, 1e-12) << r.out;
  EXPECT_NEAR(JsonNumber(r.out, "eps_mix"), 0.108, 1e-12) << r.out;
  EXPECT_NEAR(JsonNumber(r.out, "eps_cutmix"), 0.18, 1e-12) << r.out;
}

TEST_F(CliTest, RunWritesOutputsAndHonorsSeedOverride) {
  const std::string config = SmallConfig("a");
  const Result r = RunCli("run --config " + config);
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_EQ(r.out.rfind("rounds=2 test_acc=", 0), 0u) << r.out;
  const std::string metrics = ReadFile(dir_ / "a" / "metrics.csv");
  ASSERT_FALSE(metrics.empty());
  ASSERT_EQ(RunCli("run --config " + config).exit_code, 0);
  EXPECT_EQ(ReadFile(dir_ / "a" / "metrics.csv"), metrics);
  ASSERT_EQ(RunCli("run --config " + config, "SPLITMIX_SEED=12345").exit_code, 0);
  EXPECT_NE(ReadFile(dir_ / "a" / "metrics.csv"), metrics);
}

TEST_F(CliTest, SweepExportAndAttack) {
  const std::string config = SmallConfig("b");
  const Result s = RunCli("sweep --config " + config + " --axis sigma --values 0.5,1");
  ASSERT_EQ(s.exit_code, 0);
  EXPECT_EQ(s.out.rfind("axis,value,mode", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "b" / "sweep_sigma.csv"));
  const Result e = RunCli("export-smashed --config " + config + " --count 1");
  ASSERT_EQ(e.exit_code, 0);
  EXPECT_EQ(e.out, "wrote 10 images\n");
  const std::string attack = WriteConfig(
      R"({"attack": {"num_seeds": 1, "pretrain_epochs": 1, "train_count": 24,
          "test_count": 8, "epochs": 1},
          "dataset": {"train_count": 24, "test_count": 8}, "output_dir": ")" +
      (dir_ / "c").string() + "\"}");
  const Result a = RunCli("attack --config " + attack);
  ASSERT_EQ(a.exit_code, 0);
  EXPECT_EQ(a.out.rfind("scheme,train_fraction,seed,mse", 0), 0u);
  EXPECT_TRUE(fs::exists(dir_ / "c" / "leakage.csv"));
}

}  // namespace
