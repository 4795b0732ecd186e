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

// Closed-form Rényi-DP budgets for the Gaussian mechanism on smashed data and
// labels, with and without Mixup / patch-CutMix interpolation.
//
// With m = max_i λ_i, A = Δ²·D_s and B = D_y:
//   plain Gaussian   ε_o(α)      = α/2 · (A/σ_s² + B/σ_y²)
//   Mixup            ε_mix(α)    = m² · ε_o(α)
//   patch CutMix     ε_cutmix(α) = α·m/2 · (A/σ_s² + m·B/σ_y²)
// and ε_mix ≤ ε_cutmix ≤ ε_o, with equality throughout iff m = 1.
//
// Each budget is the sequential composition of a smashed-data term and a
// label term, each a Gaussian Rényi divergence α‖μ−μ'‖²/(2σ²) evaluated at
// the mechanism's worst-case squared mean difference.

#ifndef SPLITMIX_RDP_ACCOUNTANT_H_
#define SPLITMIX_RDP_ACCOUNTANT_H_

#include <limits>
#include <string>

#include "splitmix/dp_mechanism.h"
#include "splitmix/mixer.h"

namespace splitmix {

// Budget reported for a noiseless mechanism that leaks a nonzero difference.
inline constexpr double kUnboundedBudget =
    std::numeric_limits<double>::infinity();

// α·‖μ_D − μ_D'‖² / (2σ²). σ = 0 gives kUnboundedBudget for a positive norm
// and 0 for a zero norm.
double GaussianRenyiBound(double mean_diff_sq_norm, double sigma, double alpha);

// The accountant accepts Δ = 0 (label-only accounting) but otherwise checks
// the same ranges as PrivacyParams::Validate.
double EpsBaseline(const PrivacyParams& p);
double EpsMixup(const PrivacyParams& p, double max_lambda);
double EpsMixup(const PrivacyParams& p, const MixingRatios& ratios);
double EpsCutMix(const PrivacyParams& p, double max_lambda);
double EpsCutMix(const PrivacyParams& p, const MixingRatios& ratios);

struct RdpReport {
  double alpha = 0.0;
  double eps_o = 0.0;
  double eps_mix = 0.0;
  double eps_cutmix = 0.0;
  double max_lambda = 1.0;
  bool all_equal = false;  // max_lambda == 1
  PrivacyParams params;
};

// Computes the three budgets and checks ε_mix ≤ ε_cutmix ≤ ε_o (strict when
// max λ < 1 and the budgets are finite). A violation is an internal error.
RdpReport CompareMechanisms(const PrivacyParams& p, double max_lambda);
RdpReport CompareMechanisms(const PrivacyParams& p, const MixingRatios& ratios);

// One-line JSON {alpha, eps_o, eps_mix, eps_cutmix, max_lambda}. Unbounded
// budgets are written as null.
std::string RdpReportJson(const RdpReport& report);

}  // namespace splitmix

#endif  // SPLITMIX_RDP_ACCOUNTANT_H_
