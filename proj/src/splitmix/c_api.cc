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

#include "splitmix/splitmix.h"

#include <cstdlib>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <string>
#include <vector>

#include "splitmix/config.h"
#include "splitmix/error.h"
#include "splitmix/experiment.h"
#include "splitmix/mixer.h"
#include "splitmix/rdp_accountant.h"
#include "splitmix/simulator.h"
#include "splitmix/split_vit.h"

struct splitmix_config {
  splitmix::ExperimentConfig config;
};

struct splitmix_simulator {
  std::unique_ptr<splitmix::Simulator> sim;
};

namespace {

thread_local std::string last_error;

int Fail(int status, const std::string& message) {
  last_error = message;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <typename F>
int Guard(F&& body) {
  try {
    last_error.clear();
    body();
    return SPLITMIX_OK;
  } catch (const splitmix::Error& e) {
    return Fail(static_cast<int>(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return Fail(SPLITMIX_ERROR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return Fail(SPLITMIX_ERROR_INTERNAL, e.what());
  } catch (...) {
    return Fail(SPLITMIX_ERROR_INTERNAL, "unknown exception");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

void FillRdp(const splitmix::RdpReport& r, splitmix_rdp* out) {
  out->alpha = r.alpha;
  out->max_lambda = r.max_lambda;
  out->eps_o = r.eps_o;
  out->eps_mix = r.eps_mix;
  out->eps_cutmix = r.eps_cutmix;
}

#define SPLITMIX_REQUIRE(ptr) \
  if ((ptr) == nullptr)       \
  return Fail(SPLITMIX_ERROR_NULL_ARGUMENT, #ptr " must not be null")

}  // namespace

extern "C" {

const char* splitmix_version(void) { return "1.0.0"; }

const char* splitmix_status_name(int status) {
  switch (status) {
    case SPLITMIX_OK:
      return "ok";
    case SPLITMIX_ERROR_PARAMETER:
      return "parameter error";
    case SPLITMIX_ERROR_SHAPE:
      return "shape error";
    case SPLITMIX_ERROR_PROTOCOL:
      return "protocol error";
    case SPLITMIX_ERROR_STATE:
      return "state error";
    case SPLITMIX_ERROR_CONFIG:
      return "config error";
    case SPLITMIX_ERROR_IO:
      return "io error";
    case SPLITMIX_ERROR_INTERNAL:
      return "internal error";
    case SPLITMIX_ERROR_NULL_ARGUMENT:
      return "null argument";
    default:
      return "unknown status";
  }
}

const char* splitmix_last_error(void) { return last_error.c_str(); }

void splitmix_free(void* ptr) { std::free(ptr); }

int splitmix_config_load(const char* path, splitmix_config** out) {
  SPLITMIX_REQUIRE(path);
  SPLITMIX_REQUIRE(out);
  *out = nullptr;
  return Guard([&] { *out = new splitmix_config{splitmix::LoadConfig(path)}; });
}

int splitmix_config_parse(const char* json, splitmix_config** out) {
  SPLITMIX_REQUIRE(json);
  SPLITMIX_REQUIRE(out);
  *out = nullptr;
  return Guard([&] {
    *out = new splitmix_config{splitmix::ParseConfig(json)};
  });
}

int splitmix_config_to_json(const splitmix_config* config, char** json_out) {
  SPLITMIX_REQUIRE(config);
  SPLITMIX_REQUIRE(json_out);
  return Guard([&] {
    *json_out = CopyString(splitmix::ConfigToJson(config->config));
  });
}

int splitmix_config_set_seed(splitmix_config* config, uint64_t seed) {
  SPLITMIX_REQUIRE(config);
  config->config.seed = seed;
  return SPLITMIX_OK;
}

int splitmix_config_set_output_dir(splitmix_config* config, const char* dir) {
  SPLITMIX_REQUIRE(config);
  SPLITMIX_REQUIRE(dir);
  return Guard([&] { config->config.output_dir = dir; });
}

void splitmix_config_free(splitmix_config* config) { delete config; }

int splitmix_rdp_compute(double alpha, double delta_bound, double sigma_s,
                         double sigma_y, int64_t d_s, int64_t d_y,
                         double max_lambda, splitmix_rdp* out) {
  SPLITMIX_REQUIRE(out);
  return Guard([&] {
    splitmix::PrivacyParams p;
    p.alpha = alpha;
    p.delta_bound = delta_bound;
    p.sigma_s = sigma_s;
    p.sigma_y = sigma_y;
    p.d_s = d_s;
    p.d_y = d_y;
    FillRdp(splitmix::CompareMechanisms(p, max_lambda), out);
  });
}

int splitmix_config_rdp(const splitmix_config* config, splitmix_rdp* out) {
  SPLITMIX_REQUIRE(config);
  SPLITMIX_REQUIRE(out);
  return Guard([&] { FillRdp(splitmix::ConfigRdpReport(config->config), out); });
}

int splitmix_config_rdp_json(const splitmix_config* config, char** json_out) {
  SPLITMIX_REQUIRE(config);
  SPLITMIX_REQUIRE(json_out);
  return Guard([&] {
    *json_out = CopyString(
        splitmix::RdpReportJson(splitmix::ConfigRdpReport(config->config)));
  });
}

int splitmix_run(const splitmix_config* config, splitmix_run_summary* summary) {
  SPLITMIX_REQUIRE(config);
  return Guard([&] {
    config->config.Validate();
    const splitmix::RunResult r = splitmix::RunExperiment(config->config);
    splitmix::WriteRunOutputs(config->config, r);
    if (summary != nullptr) {
      summary->rounds = static_cast<int32_t>(r.rounds.size());
      summary->final_accuracy = r.final_accuracy;
      summary->final_train_loss = r.rounds.empty() ? 0.0 : r.rounds.back().train_loss;
      FillRdp(r.rdp, &summary->rdp);
      summary->mean_uplink_payload = r.comm.mean_uplink_payload;
      summary->dense_uplink_payload = r.comm.dense_payload;
      summary->uplink_reduction = r.comm.reduction_factor;
    }
  });
}

int splitmix_sweep(const splitmix_config* config, const char* axis,
                   const double* values, size_t num_values, char** csv_out) {
  SPLITMIX_REQUIRE(config);
  SPLITMIX_REQUIRE(axis);
  if (num_values > 0) SPLITMIX_REQUIRE(values);
  return Guard([&] {
    const std::string csv =
        splitmix::RunSweep(config->config, splitmix::ParseSweepAxis(axis),
                           std::vector<double>(values, values + num_values));
    if (csv_out != nullptr) *csv_out = CopyString(csv);
  });
}

int splitmix_export_smashed(const splitmix_config* config, int32_t count,
                            size_t* files_written) {
  SPLITMIX_REQUIRE(config);
  return Guard([&] {
    const auto paths = splitmix::ExportSmashedImages(config->config, count);
    if (files_written != nullptr) *files_written = paths.size();
  });
}

int splitmix_attack(const splitmix_config* config, char** csv_out) {
  SPLITMIX_REQUIRE(config);
  return Guard([&] {
    const splitmix::LeakageReport report = splitmix::RunAttack(config->config);
    if (csv_out != nullptr) *csv_out = CopyString(report.ToCsv());
  });
}

int splitmix_simulator_create(const splitmix_config* config,
                              splitmix_simulator** out) {
  SPLITMIX_REQUIRE(config);
  SPLITMIX_REQUIRE(out);
  *out = nullptr;
  return Guard([&] {
    auto sim = std::make_unique<splitmix::Simulator>(config->config);
    *out = new splitmix_simulator{std::move(sim)};
  });
}

int splitmix_simulator_total_rounds(const splitmix_simulator* sim,
                                    int32_t* rounds) {
  SPLITMIX_REQUIRE(sim);
  SPLITMIX_REQUIRE(rounds);
  *rounds = sim->sim->total_rounds();
  return SPLITMIX_OK;
}

int splitmix_simulator_step(splitmix_simulator* sim,
                            splitmix_round_metrics* metrics) {
  SPLITMIX_REQUIRE(sim);
  return Guard([&] {
    const splitmix::RoundMetrics m = sim->sim->RunRound();
    if (metrics != nullptr) {
      metrics->round = m.round;
      metrics->num_groups = m.num_groups;
      metrics->train_loss = m.train_loss;
      metrics->max_lambda = m.max_lambda;
      metrics->uplink_bytes = m.uplink_bytes;
      metrics->downlink_bytes = m.downlink_bytes;
    }
  });
}

int splitmix_simulator_evaluate(const splitmix_simulator* sim,
                                double* accuracy) {
  SPLITMIX_REQUIRE(sim);
  SPLITMIX_REQUIRE(accuracy);
  return Guard([&] { *accuracy = sim->sim->Evaluate(); });
}

int splitmix_simulator_lower_params(const splitmix_simulator* sim,
                                    int32_t client, uint8_t** bytes_out,
                                    size_t* size_out) {
  SPLITMIX_REQUIRE(sim);
  SPLITMIX_REQUIRE(bytes_out);
  SPLITMIX_REQUIRE(size_out);
  return Guard([&] {
    const auto& lowers = sim->sim->state().lowers;
    if (client < 0 || static_cast<size_t>(client) >= lowers.size()) {
      splitmix::ThrowParameter("client " + std::to_string(client) +
                               " out of range");
    }
    const std::vector<uint8_t> bytes = splitmix::SerializeParams(lowers[client]);
    auto* buf = static_cast<uint8_t*>(std::malloc(bytes.empty() ? 1 : bytes.size()));
    if (buf == nullptr) throw std::bad_alloc();
    std::memcpy(buf, bytes.data(), bytes.size());
    *bytes_out = buf;
    *size_out = bytes.size();
  });
}

void splitmix_simulator_free(splitmix_simulator* sim) { delete sim; }

int splitmix_build_patch_masks(uint64_t seed, const double* lambdas,
                               size_t group_size, int32_t num_patches,
                               uint8_t* owners_out) {
  SPLITMIX_REQUIRE(lambdas);
  SPLITMIX_REQUIRE(owners_out);
  return Guard([&] {
    if (group_size == 0 || group_size > 255) {
      splitmix::ThrowParameter("group size must be in [1, 255]");
    }
    splitmix::MixingRatios ratios{
        std::vector<double>(lambdas, lambdas + group_size)};
    splitmix::SeededRng rng(seed, 0);
    const auto masks = splitmix::BuildPatchMasks(rng, ratios, num_patches);
    const auto owners = splitmix::OwnerMap(masks, num_patches);
    std::memcpy(owners_out, owners.data(), owners.size());
  });
}

}  // extern "C"
