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

#include "splitmix/rdp_accountant.h"

#include <cmath>

#include "json.hpp"
#include "splitmix/error.h"

namespace splitmix {
namespace {

void ValidateForAccounting(const PrivacyParams& p) {
  if (!(p.delta_bound >= 0.0) || !std::isfinite(p.delta_bound)) {
    ThrowParameter("accountant: delta_bound must be finite and >= 0");
  }
  if (!(p.sigma_s >= 0.0) || !(p.sigma_y >= 0.0)) {
    ThrowParameter("accountant: noise std must be >= 0");
  }
  if (p.d_s < 1 || p.d_y < 1) ThrowParameter("accountant: d_s, d_y must be >= 1");
  if (!(p.alpha > 1.0) || !std::isfinite(p.alpha)) {
    ThrowParameter("accountant: alpha must be finite and > 1");
  }
}

void ValidateMaxLambda(double max_lambda) {
  if (!(max_lambda > 0.0 && max_lambda <= 1.0)) {
    ThrowParameter("accountant: max lambda must lie in (0, 1]");
  }
}

// Worst-case ‖μ_D − μ_D'‖² of the smashed-data output: Δ² per coordinate.
double SmashedSensitivitySq(const PrivacyParams& p) {
  return p.delta_bound * p.delta_bound * static_cast<double>(p.d_s);
}

// One-hot labels in [0, 1]^{D_y}: 1 per coordinate.
double LabelSensitivitySq(const PrivacyParams& p) {
  return static_cast<double>(p.d_y);
}

}  // namespace

double GaussianRenyiBound(double mean_diff_sq_norm, double sigma,
                          double alpha) {
  if (!(mean_diff_sq_norm >= 0.0)) {
    ThrowParameter("GaussianRenyiBound: squared norm must be >= 0");
  }
  if (!(sigma >= 0.0)) ThrowParameter("GaussianRenyiBound: sigma must be >= 0");
  if (!(alpha > 1.0)) ThrowParameter("GaussianRenyiBound: alpha must be > 1");
  if (mean_diff_sq_norm == 0.0) return 0.0;
  if (sigma == 0.0) return kUnboundedBudget;
  return alpha * mean_diff_sq_norm / (2.0 * sigma * sigma);
}

double EpsBaseline(const PrivacyParams& p) {
  ValidateForAccounting(p);
  return GaussianRenyiBound(SmashedSensitivitySq(p), p.sigma_s, p.alpha) +
         GaussianRenyiBound(LabelSensitivitySq(p), p.sigma_y, p.alpha);
}

double EpsMixup(const PrivacyParams& p, double max_lambda) {
  ValidateMaxLambda(max_lambda);
  // The mixed output scales the differing client's mean by λ, so both
  // squared sensitivities pick up λ².
  return max_lambda * max_lambda * EpsBaseline(p);
}

double EpsMixup(const PrivacyParams& p, const MixingRatios& ratios) {
  ratios.Validate();
  return EpsMixup(p, ratios.Max());
}

double EpsCutMix(const PrivacyParams& p, double max_lambda) {
  ValidateForAccounting(p);
  ValidateMaxLambda(max_lambda);
  // Only the λ·D_s masked coordinates differ (Δ² each); the label is mixed
  // as in Mixup.
  return GaussianRenyiBound(max_lambda * SmashedSensitivitySq(p), p.sigma_s,
                            p.alpha) +
         GaussianRenyiBound(max_lambda * max_lambda * LabelSensitivitySq(p),
                            p.sigma_y, p.alpha);
}

double EpsCutMix(const PrivacyParams& p, const MixingRatios& ratios) {
  ratios.Validate();
  return EpsCutMix(p, ratios.Max());
}

RdpReport CompareMechanisms(const PrivacyParams& p, double max_lambda) {
  RdpReport report;
  report.alpha = p.alpha;
  report.params = p;
  report.max_lambda = max_lambda;
  report.eps_o = EpsBaseline(p);
  report.eps_mix = EpsMixup(p, max_lambda);
  report.eps_cutmix = EpsCutMix(p, max_lambda);
  report.all_equal = max_lambda == 1.0;

  if (!(report.eps_mix <= report.eps_cutmix &&
        report.eps_cutmix <= report.eps_o)) {
    ThrowInternal("RDP ordering violated: eps_mix=" +
                  std::to_string(report.eps_mix) +
                  " eps_cutmix=" + std::to_string(report.eps_cutmix) +
                  " eps_o=" + std::to_string(report.eps_o));
  }
  if (report.all_equal && !(report.eps_mix == report.eps_o &&
                            report.eps_cutmix == report.eps_o)) {
    ThrowInternal("RDP budgets differ although max lambda is 1");
  }
  return report;
}

RdpReport CompareMechanisms(const PrivacyParams& p,
                            const MixingRatios& ratios) {
  ratios.Validate();
  return CompareMechanisms(p, ratios.Max());
}

std::string RdpReportJson(const RdpReport& report) {
  auto number = [](double v) -> nlohmann::ordered_json {
    if (std::isfinite(v)) return v;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["alpha"] = report.alpha;
  j["eps_o"] = number(report.eps_o);
  j["eps_mix"] = number(report.eps_mix);
  j["eps_cutmix"] = number(report.eps_cutmix);
  j["max_lambda"] = report.max_lambda;
  return j.dump();
}

}  // namespace splitmix
