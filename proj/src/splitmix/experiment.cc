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

#include "splitmix/experiment.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "splitmix/dataset.h"
#include "splitmix/dp_mechanism.h"
#include "splitmix/error.h"
#include "splitmix/interpolation.h"
#include "splitmix/mixer.h"

namespace splitmix {
namespace {

constexpr uint64_t kExportStream = 8;

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowIo("cannot write '" + path.string() + "'");
  out << text;
  if (!out) ThrowIo("write failed for '" + path.string() + "'");
}

void MakeDirs(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) ThrowIo("cannot create '" + dir.string() + "': " + ec.message());
}

int SmallestGroup(int n, int g) { return n % g == 0 ? g : n % g; }

const char* kMetricsHeader =
    "round,mode,n,g,sigma_s,sigma_y,train_loss,test_acc,eps_o,eps_mix,"
    "eps_cutmix,uplink_bytes,downlink_bytes\n";

}  // namespace

std::string FormatNumber(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double ConfiguredMaxLambda(const ExperimentConfig& config) {
  if (!ModeUsesMixer(config.mode)) return 1.0;
  if (config.lambda.mode == LambdaMode::kDirichlet) return 1.0;
  return 1.0 / SmallestGroup(config.num_clients, config.group_size);
}

PrivacyParams EffectivePrivacy(const ExperimentConfig& config) {
  PrivacyParams p = config.privacy;
  if (!ModeAddsNoise(config.mode)) {
    p.sigma_s = 0.0;
    p.sigma_y = 0.0;
  }
  return p;
}

RdpReport ModeRdpReport(const ExperimentConfig& config, double max_lambda) {
  if (!ModeUsesServer(config.mode)) {
    RdpReport report;
    report.alpha = config.privacy.alpha;
    report.params = config.privacy;
    report.max_lambda = max_lambda;
    report.all_equal = true;
    return report;
  }
  return CompareMechanisms(EffectivePrivacy(config), max_lambda);
}

RdpReport ConfigRdpReport(const ExperimentConfig& config) {
  return ModeRdpReport(config, ConfiguredMaxLambda(config));
}

RunResult RunExperiment(const ExperimentConfig& config) {
  Simulator sim(config);
  RunResult result;
  std::ostringstream csv;
  csv << kMetricsHeader;
  const bool uniform = config.lambda.mode == LambdaMode::kUniform;
  const double uniform_max = ConfiguredMaxLambda(config);
  double run_max = ModeUsesMixer(config.mode) ? 0.0 : 1.0;
  double accuracy = 0.0;
  const int total = sim.total_rounds();
  for (int r = 1; r <= total; ++r) {
    const RoundMetrics m = sim.RunRound();
    if (r == 1 || r % sim.rounds_per_epoch() == 0 || r == total) {
      accuracy = sim.Evaluate();
    }
    run_max = std::max(run_max, m.max_lambda);
    const RdpReport eps = ModeRdpReport(config, uniform ? uniform_max : m.max_lambda);
    csv << m.round << ',' << ModeName(config.mode) << ',' << config.num_clients
        << ',' << config.group_size << ',' << FormatNumber(config.privacy.sigma_s)
        << ',' << FormatNumber(config.privacy.sigma_y) << ','
        << FormatNumber(m.train_loss) << ',' << FormatNumber(accuracy) << ','
        << FormatNumber(eps.eps_o) << ',' << FormatNumber(eps.eps_mix) << ','
        << FormatNumber(eps.eps_cutmix) << ',' << m.uplink_bytes << ','
        << m.downlink_bytes << '\n';
    result.rounds.push_back(m);
    result.test_accuracy.push_back(accuracy);
  }
  if (total == 0) accuracy = sim.Evaluate();
  if (sim.transport().log().TotalPayloadBytes() !=
      sim.transport().delivered_payload_bytes()) {
    ThrowInternal("traffic log disagrees with delivered payload bytes");
  }
  result.final_accuracy = accuracy;
  result.rdp = ModeRdpReport(config, uniform || run_max == 0.0 ? uniform_max : run_max);
  result.traffic = sim.transport().log();
  result.comm = ComputeCommReport(result.traffic, config);
  result.metrics_csv = csv.str();
  result.traffic_csv = result.traffic.ToCsv();
  result.rdp_json = RdpReportJson(result.rdp) + "\n";
  return result;
}

void WriteRunOutputs(const ExperimentConfig& config, const RunResult& result) {
  const std::filesystem::path dir(config.output_dir);
  MakeDirs(dir);
  WriteText(dir / "metrics.csv", result.metrics_csv);
  WriteText(dir / "traffic.csv", result.traffic_csv);
  WriteText(dir / "rdp.json", result.rdp_json);
}

SweepAxis ParseSweepAxis(const std::string& name) {
  if (name == "sigma") return SweepAxis::kSigma;
  if (name == "group_size") return SweepAxis::kGroupSize;
  if (name == "num_clients") return SweepAxis::kNumClients;
  ThrowConfig("unknown sweep axis '" + name +
              "' (expected sigma, group_size or num_clients)");
}

std::string SweepAxisName(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::kSigma:
      return "sigma";
    case SweepAxis::kGroupSize:
      return "group_size";
    case SweepAxis::kNumClients:
      return "num_clients";
  }
  return "unknown";
}

ExperimentConfig ApplySweepValue(const ExperimentConfig& base, SweepAxis axis,
                                 double value) {
  ExperimentConfig c = base;
  auto as_int = [&]() {
    if (!(value >= 1.0) || value != std::floor(value) || value > 1e6) {
      ThrowConfig(SweepAxisName(axis) + " values must be positive integers");
    }
    return static_cast<int>(value);
  };
  switch (axis) {
    case SweepAxis::kSigma:
      c.privacy.sigma_s = value;
      c.privacy.sigma_y = value;
      break;
    case SweepAxis::kGroupSize:
      c.group_size = as_int();
      break;
    case SweepAxis::kNumClients:
      c.num_clients = as_int();
      c.group_size = std::min(c.group_size, c.num_clients);
      break;
  }
  c.Validate();
  return c;
}

std::string RunSweep(const ExperimentConfig& base, SweepAxis axis,
                     const std::vector<double>& values) {
  if (values.empty()) ThrowConfig("sweep needs at least one value");
  std::vector<ExperimentConfig> configs;
  for (size_t i = 0; i < values.size(); ++i) {
    ExperimentConfig c = ApplySweepValue(base, axis, values[i]);
    c.output_dir = (std::filesystem::path(base.output_dir) /
                    (SweepAxisName(axis) + "_" + std::to_string(i)))
                       .string();
    configs.push_back(std::move(c));
  }
  std::ostringstream csv;
  csv << "axis,value,mode,n,g,sigma_s,sigma_y,rounds,train_loss,test_acc,"
         "eps_o,eps_mix,eps_cutmix,uplink_bytes,downlink_bytes\n";
  for (size_t i = 0; i < configs.size(); ++i) {
    const ExperimentConfig& c = configs[i];
    const RunResult r = RunExperiment(c);
    WriteRunOutputs(c, r);
    uint64_t up = 0, down = 0;
    for (const RoundMetrics& m : r.rounds) {
      up += m.uplink_bytes;
      down += m.downlink_bytes;
    }
    const double loss = r.rounds.empty() ? 0.0 : r.rounds.back().train_loss;
    csv << SweepAxisName(axis) << ',' << FormatNumber(values[i]) << ','
        << ModeName(c.mode) << ',' << c.num_clients << ',' << c.group_size << ','
        << FormatNumber(c.privacy.sigma_s) << ',' << FormatNumber(c.privacy.sigma_y)
        << ',' << r.rounds.size() << ',' << FormatNumber(loss) << ','
        << FormatNumber(r.final_accuracy) << ',' << FormatNumber(r.rdp.eps_o) << ','
        << FormatNumber(r.rdp.eps_mix) << ',' << FormatNumber(r.rdp.eps_cutmix)
        << ',' << up << ',' << down << '\n';
  }
  const std::filesystem::path dir(base.output_dir);
  MakeDirs(dir);
  WriteText(dir / ("sweep_" + SweepAxisName(axis) + ".csv"), csv.str());
  return csv.str();
}

Tensor RenderPatches(const Tensor& patches, int grid_h, int grid_w, int cell) {
  if (patches.rank() != 2 || patches.rows() != static_cast<size_t>(grid_h * grid_w)) {
    ThrowShape("RenderPatches: " + patches.ShapeString() + " does not fit the grid");
  }
  std::vector<double> means(patches.rows());
  for (size_t p = 0; p < patches.rows(); ++p) {
    double sum = 0.0;
    for (double v : patches.row(p)) sum += v;
    means[p] = sum / static_cast<double>(patches.cols());
  }
  const auto [lo, hi] = std::minmax_element(means.begin(), means.end());
  const double lo_v = *lo, range = *hi - *lo;
  Tensor img = Tensor::Matrix(grid_h * cell, grid_w * cell);
  for (int y = 0; y < grid_h * cell; ++y) {
    for (int x = 0; x < grid_w * cell; ++x) {
      const double m = means[(y / cell) * grid_w + (x / cell)];
      img(y, x) = range > 0.0 ? (m - lo_v) / range : 0.0;
    }
  }
  return img;
}

std::vector<std::string> ExportSmashedImages(const ExperimentConfig& config,
                                             int count) {
  config.Validate();
  if (count < 1) ThrowParameter("export needs a positive sample count");
  const DataSplit data = MakeDataSplit(config);
  const Dataset& pool = data.test.size() >= 2 ? data.test : data.train;
  if (pool.size() < 2) ThrowConfig("export needs at least two images");
  const ModelConfig& m = config.model;
  SeededRng init(config.seed, kLowerInitStream);
  const LowerSegment lower = InitLowerSegment(m, init);
  SeededRng rng(config.seed, kExportStream);
  const MixingRatios half{{0.5, 0.5}};
  const std::filesystem::path dir =
      std::filesystem::path(config.output_dir) / "smashed_images";
  MakeDirs(dir);

  struct Domain {
    const char* name;
    int grid_h, grid_w, cell;
  };
  const Domain domains[] = {{"pixel", m.image_height, m.image_width, 1},
                            {"smashed", m.grid_h(), m.grid_w(), m.patch_size}};
  std::vector<std::string> paths;
  for (int i = 0; i < count; ++i) {
    const size_t a = static_cast<size_t>(i) % pool.size();
    const size_t b = (a + 1) % pool.size();
    for (const Domain& d : domains) {
      const bool pixel = std::string(d.name) == "pixel";
      auto represent = [&](const Tensor& image) {
        if (pixel) {
          return image.Reshaped({static_cast<size_t>(m.image_height * m.image_width),
                                 static_cast<size_t>(m.channels)});
        }
        return ClampSmashed(LowerForward(lower, image), config.privacy.delta_bound);
      };
      const SmashedData sa{represent(pool.images[a]), 0};
      const SmashedData sb{represent(pool.images[b]), 1};
      const int n = sa.num_patches();
      const std::vector<PatchMask> masks = BuildPatchMasks(rng, half, n);
      std::vector<std::pair<std::string, Tensor>> views;
      views.emplace_back("original", sa.patches);
      views.emplace_back("cutout", Cutout(sa, masks[0]).patches);
      const WeightedSmashed mix[] = {{sa, 0.5}, {sb, 0.5}};
      views.emplace_back("mixup", Mixup(mix).patches);
      const MaskedUpload ups[] = {{Cutout(sa, masks[0]), masks[0]},
                                  {Cutout(sb, masks[1]), masks[1]}};
      views.emplace_back("patch_cutmix", PatchCutMixAggregate(ups).patches);
      if (d.grid_h == d.grid_w) {
        views.emplace_back("vanilla_cutmix",
                           VanillaCutMix(sa, sb, 0.5, rng).mixed.patches);
      }
      for (const auto& [scheme, patches] : views) {
        const std::filesystem::path path =
            dir / ("sample" + std::to_string(i) + "_" + d.name + "_" + scheme + ".pgm");
        WritePgm(path.string(), RenderPatches(patches, d.grid_h, d.grid_w, d.cell));
        paths.push_back(path.string());
      }
    }
  }
  return paths;
}

LeakageReport RunAttack(const ExperimentConfig& config) {
  LeakageReport report = RunLeakageSweep(config);
  const std::filesystem::path dir(config.output_dir);
  MakeDirs(dir);
  WriteText(dir / "leakage.csv", report.ToCsv());
  return report;
}

}  // namespace splitmix
