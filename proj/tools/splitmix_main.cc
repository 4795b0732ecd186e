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

// splitmix command-line tool. Exit codes: 0 success, 2 invalid
// configuration or arguments, 3 internal invariant failure, 1 other errors.

#include <cerrno>
#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "splitmix/splitmix.h"

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 3;

int ExitCodeFor(int status) {
  switch (status) {
    case SPLITMIX_OK:
      return 0;
    case SPLITMIX_ERROR_CONFIG:
      return kExitConfig;
    case SPLITMIX_ERROR_INTERNAL:
      return kExitInternal;
    default:
      return kExitOther;
  }
}

int Report(int status) {
  if (status != SPLITMIX_OK) {
    std::fprintf(stderr, "splitmix: %s: %s\n", splitmix_status_name(status),
                 splitmix_last_error());
  }
  return ExitCodeFor(status);
}

// Owns a config handle for the duration of one command.
class ConfigHandle {
 public:
  ~ConfigHandle() { splitmix_config_free(config_); }

  // Loads `path` and applies SPLITMIX_SEED. Returns a process exit code.
  int Load(const std::string& path) {
    int status = splitmix_config_load(path.c_str(), &config_);
    if (status != SPLITMIX_OK) {
      // Every load failure is a problem with the configuration input.
      std::fprintf(stderr, "splitmix: invalid config: %s\n",
                   splitmix_last_error());
      return kExitConfig;
    }
    if (const char* env = std::getenv("SPLITMIX_SEED"); env != nullptr) {
      char* end = nullptr;
      errno = 0;
      const unsigned long long seed = std::strtoull(env, &end, 10);
      if (*env == '\0' || *env == '-' || *end != '\0' || errno == ERANGE) {
        std::fprintf(stderr, "splitmix: invalid SPLITMIX_SEED '%s'\n", env);
        return kExitConfig;
      }
      splitmix_config_set_seed(config_, seed);
    }
    return 0;
  }

  splitmix_config* get() { return config_; }

 private:
  splitmix_config* config_ = nullptr;
};

void PrintString(char* text) {
  std::fputs(text, stdout);
  if (*text != '\0' && text[std::char_traits<char>::length(text) - 1] != '\n') {
    std::fputc('\n', stdout);
  }
  splitmix_free(text);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentially private split learning with patch-wise mixing"};
  app.require_subcommand(1);

  std::string config_path;
  std::string axis;
  std::vector<double> values;
  int count = 4;

  CLI::App* run = app.add_subcommand("run", "Train and write metrics.csv, traffic.csv, rdp.json");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();

  CLI::App* sweep = app.add_subcommand("sweep", "One run per value of a parameter");
  sweep->add_option("--config", config_path, "Base config (JSON)")->required();
  sweep->add_option("--axis", axis, "sigma, group_size or num_clients")
      ->required()
      ->check(CLI::IsMember({"sigma", "group_size", "num_clients"}));
  sweep->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');

  CLI::App* rdp = app.add_subcommand("rdp", "Print the Renyi budgets as JSON");
  rdp->add_option("--config", config_path, "Experiment config (JSON)")->required();

  CLI::App* exp = app.add_subcommand("export-smashed", "Write PGM renderings of each scheme");
  exp->add_option("--config", config_path, "Experiment config (JSON)")->required();
  exp->add_option("--count", count, "Number of samples")->check(CLI::PositiveNumber);

  CLI::App* attack = app.add_subcommand("attack", "Run the reconstruction attack sweep");
  attack->add_option("--config", config_path, "Experiment config (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  ConfigHandle config;
  if (int code = config.Load(config_path); code != 0) return code;

  if (run->parsed()) {
    splitmix_run_summary summary{};
    const int status = splitmix_run(config.get(), &summary);
    if (status != SPLITMIX_OK) return Report(status);
    std::printf("rounds=%d test_acc=%.4f train_loss=%.4f uplink_reduction=%.3f\n",
                summary.rounds, summary.final_accuracy, summary.final_train_loss,
                summary.uplink_reduction);
    return 0;
  }
  if (sweep->parsed()) {
    char* csv = nullptr;
    const int status = splitmix_sweep(config.get(), axis.c_str(), values.data(),
                                      values.size(), &csv);
    if (status != SPLITMIX_OK) return Report(status);
    PrintString(csv);
    return 0;
  }
  if (rdp->parsed()) {
    char* json = nullptr;
    const int status = splitmix_config_rdp_json(config.get(), &json);
    if (status != SPLITMIX_OK) return Report(status);
    PrintString(json);
    return 0;
  }
  if (exp->parsed()) {
    size_t written = 0;
    const int status = splitmix_export_smashed(config.get(), count, &written);
    if (status != SPLITMIX_OK) return Report(status);
    std::printf("wrote %zu images\n", written);
    return 0;
  }
  if (attack->parsed()) {
    char* csv = nullptr;
    const int status = splitmix_attack(config.get(), &csv);
    if (status != SPLITMIX_OK) return Report(status);
    PrintString(csv);
    return 0;
  }
  return kExitOther;
}
