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

#ifndef SPLITMIX_EXPERIMENT_H_
#define SPLITMIX_EXPERIMENT_H_

#include <string>
#include <vector>

#include "splitmix/attack_recon.h"
#include "splitmix/config.h"
#include "splitmix/protocol.h"
#include "splitmix/rdp_accountant.h"
#include "splitmix/simulator.h"

namespace splitmix {

// Largest mixing ratio any client can be assigned: 1 / (smallest group
// size) for uniform ratios, 1 for Dirichlet ratios (their support reaches
// the simplex corners) and for modes without mixing.
double ConfiguredMaxLambda(const ExperimentConfig& config);

// Privacy parameters of what the mode actually releases: plain_sl adds no
// noise, so both noise levels are zero there.
PrivacyParams EffectivePrivacy(const ExperimentConfig& config);

// Budgets for the mode at the given max λ. Standalone modes release
// nothing and report zeros.
RdpReport ModeRdpReport(const ExperimentConfig& config, double max_lambda);

// What `splitmix rdp` prints: ModeRdpReport at ConfiguredMaxLambda.
RdpReport ConfigRdpReport(const ExperimentConfig& config);

struct RunResult {
  std::vector<RoundMetrics> rounds;
  std::vector<double> test_accuracy;  // Per round, carried forward.
  double final_accuracy = 0.0;
  RdpReport rdp;
  TrafficLog traffic;
  CommReport comm;
  std::string metrics_csv;
  std::string traffic_csv;
  std::string rdp_json;
};

// Trains for Simulator::total_rounds() rounds. Test accuracy is measured
// after round 1, at every epoch boundary and after the last round. The
// rdp report uses the largest ratio drawn during the run in Dirichlet mode.
RunResult RunExperiment(const ExperimentConfig& config);

// Writes metrics.csv, traffic.csv and rdp.json into config.output_dir.
void WriteRunOutputs(const ExperimentConfig& config, const RunResult& result);

enum class SweepAxis { kSigma, kGroupSize, kNumClients };
SweepAxis ParseSweepAxis(const std::string& name);
std::string SweepAxisName(SweepAxis axis);

// Copy of `base` with the axis set to `value` (sigma sets both noise
// levels; a num_clients value below group_size also lowers group_size).
ExperimentConfig ApplySweepValue(const ExperimentConfig& base, SweepAxis axis,
                                 double value);

// One run per value, each writing its outputs under
// output_dir/<axis>_<index>. Returns the merged CSV (one row per value,
// in the given order) and writes it to output_dir/sweep_<axis>.csv.
std::string RunSweep(const ExperimentConfig& base, SweepAxis axis,
                     const std::vector<double>& values);

// Renders `count` test images under every interpolation scheme in pixel
// space (one pixel per patch) and in smashed space (one cell per patch,
// feature-averaged), min-max normalized, as P5 files under
// output_dir/smashed_images. Returns the written paths.
std::vector<std::string> ExportSmashedImages(const ExperimentConfig& config,
                                             int count);

// Renders a patch matrix (N × F) on a grid_h × grid_w grid with `cell`
// pixels per patch side: feature mean per patch, min-max normalized.
Tensor RenderPatches(const Tensor& patches, int grid_h, int grid_w, int cell);

// RunLeakageSweep plus output_dir/leakage.csv.
LeakageReport RunAttack(const ExperimentConfig& config);

// "inf" for infinities, otherwise %.10g.
std::string FormatNumber(double v);

}  // namespace splitmix

#endif  // SPLITMIX_EXPERIMENT_H_
