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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "splitmix/error.h"
#include "splitmix/experiment.h"
#include "splitmix/mixer.h"
#include "splitmix/protocol.h"
#include "splitmix/rdp_accountant.h"
#include "splitmix/simulator.h"
#include "splitmix/split_vit.h"

namespace splitmix {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* fmt, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), fmt, a, b, c, d);
  return buf;
}

double RelErr(double got, double want) {
  return std::abs(got - want) / std::abs(want);
}

// 1. Closed-form budgets against a hand evaluation.
Outcome RdpOracle() {
  ExperimentConfig config;  // α=2, Δ=0.2, D_s=20, D_y=10, σ=1, n=g=10.
  const RdpReport r = ConfigRdpReport(config);
  // ε_o = α/2 (Δ²D_s/σ_s² + D_y/σ_y²) = 0.04·20 + 10.
  const double eps_o = 0.8 + 10.0;
  // ε_Mix = λ² ε_o with λ = 0.1.
  const double eps_mix = 0.01 * eps_o;
  // ε_CutMix = α λ / 2 (Δ²D_s/σ_s² + λ D_y/σ_y²) = 0.1 (0.8 + 1).
  const double eps_cutmix = 0.1 * (0.8 + 0.1 * 10.0);
  const double worst = std::max({RelErr(r.eps_o, eps_o), RelErr(r.eps_mix, eps_mix),
                                 RelErr(r.eps_cutmix, eps_cutmix)});
  return {worst <= 1e-12 && std::abs(eps_o - 10.8) < 1e-12 &&
              std::abs(eps_mix - 0.108) < 1e-12 &&
              std::abs(eps_cutmix - 0.18) < 1e-12,
          Fmt("eps_o=%.12g eps_mix=%.12g eps_cutmix=%.12g max_rel_err=%.2e",
              r.eps_o, r.eps_mix, r.eps_cutmix, worst)};
}

// 2. ε_Mix ≤ ε_CutMix ≤ ε_o over random parameters.
Outcome OrderingProperty() {
  SeededRng rng(2024, 0);
  int violations = 0, strict_checked = 0, single = 0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) {
    PrivacyParams p;
    p.alpha = 1.0 + 63.0 * (1.0 - rng.NextUniform());
    p.delta_bound = 1.0 - rng.NextUniform();
    p.sigma_s = 4.0 * (1.0 - rng.NextUniform());
    p.sigma_y = 4.0 * (1.0 - rng.NextUniform());
    p.d_s = 1 + static_cast<int64_t>(rng.NextBelow(10000));
    p.d_y = 1 + static_cast<int64_t>(rng.NextBelow(10000));
    const int n = i % 10 == 0 ? 1 : 1 + static_cast<int>(rng.NextBelow(32));
    const MixingRatios ratios{SampleDirichlet(rng, std::vector<double>(n, 1.0))};
    const RdpReport r = CompareMechanisms(p, ratios);
    const bool weak = r.eps_mix <= r.eps_cutmix && r.eps_cutmix <= r.eps_o;
    bool ok = weak;
    if (n == 1) {
      ++single;
      ok = ok && r.eps_mix == r.eps_o && r.eps_cutmix == r.eps_o;
    } else if (r.max_lambda < 1.0) {
      ++strict_checked;
      ok = ok && r.eps_mix < r.eps_cutmix && r.eps_cutmix < r.eps_o;
    }
    violations += !ok;
  }
  return {violations == 0,
          Fmt("%g draws (%g strict, %g with n=1), %g violations", draws,
              strict_checked, single, violations)};
}

// 3. Masks partition the patches with sizes within 1 of λ_i N.
Outcome MaskPartition() {
  SeededRng rng(77, 0);
  int violations = 0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) {
    const int num_patches = 1 + static_cast<int>(rng.NextBelow(256));
    const int n = 1 + static_cast<int>(rng.NextBelow(32));
    const MixingRatios ratios{SampleDirichlet(rng, std::vector<double>(n, 1.0))};
    const std::vector<PatchMask> masks = BuildPatchMasks(rng, ratios, num_patches);
    std::vector<int> owner(num_patches, -1);
    bool ok = static_cast<int>(masks.size()) == n;
    for (int k = 0; k < n && ok; ++k) {
      for (int patch : masks[k].selected) {
        if (patch < 0 || patch >= num_patches || owner[patch] != -1) ok = false;
        else owner[patch] = k;
      }
      const double target = ratios.lambdas[k] * num_patches;
      if (std::abs(static_cast<double>(masks[k].selected.size()) - target) > 1.0) {
        ok = false;
      }
    }
    ok = ok && std::count(owner.begin(), owner.end(), -1) == 0;
    violations += !ok;
  }
  return {violations == 0, Fmt("%g draws, %g violations", draws, violations)};
}

// 4. Tiny ViT analytic gradients against central differences.
Outcome GradientFidelity() {
  ModelConfig c;
  c.image_height = 4;
  c.image_width = 4;
  c.patch_size = 2;
  c.embed_dim = 8;
  c.num_blocks = 1;
  c.num_heads = 2;
  c.num_classes = 3;
  c.init_std = 0.3;
  SeededRng r1(4, 1), r2(4, 2), r3(4, 3);
  LowerSegment lower = InitLowerSegment(c, r1);
  UpperSegment upper = InitUpperSegment(c, r2);
  Tensor image({4, 4, 1});
  for (double& v : image.data()) v = r3.NextUniform();
  const Tensor target = Tensor::Vector({0.1, 0.6, 0.3});
  auto loss = [&](const Tensor& x) {
    return SoftCrossEntropy(UpperForward(upper, x), target);
  };
  auto full_loss = [&] { return loss(LowerForward(lower, image)); };

  LowerCache lc;
  const Tensor s = LowerForward(lower, image, &lc);
  UpperCache uc;
  Tensor dlogits;
  SoftCrossEntropy(UpperForward(upper, s, &uc), target, &dlogits);
  UpperSegment ug = ZerosLike(upper);
  const Tensor ds = UpperBackward(upper, uc, dlogits, &ug);
  LowerSegment lg = ZerosLike(lower);
  LowerBackward(lower, lc, ds, &lg);

  const double h = 1e-5;
  double worst = 0.0;
  size_t checked = 0;
  auto compare = [&](double numeric, double analytic) {
    // Entries whose true gradient is zero (the key bias) only carry
    // difference roundoff, hence the floor.
    const double denom = std::max(std::abs(numeric) + std::abs(analytic), 1e-6);
    worst = std::max(worst, std::abs(numeric - analytic) / denom);
    ++checked;
  };
  auto sweep = [&](auto& seg, const auto& grads) {
    std::vector<Tensor*> params;
    std::vector<const Tensor*> analytic;
    ForEachParam(seg, [&](const std::string&, Tensor& t) { params.push_back(&t); });
    ForEachParam(grads, [&](const std::string&, const Tensor& t) {
      analytic.push_back(&t);
    });
    for (size_t k = 0; k < params.size(); ++k) {
      for (size_t i = 0; i < params[k]->size(); ++i) {
        double& w = (*params[k])[i];
        const double saved = w;
        w = saved + h;
        const double up = full_loss();
        w = saved - h;
        const double down = full_loss();
        w = saved;
        compare((up - down) / (2 * h), (*analytic[k])[i]);
      }
    }
  };
  sweep(upper, ug);
  sweep(lower, lg);
  Tensor x = s;
  for (size_t i = 0; i < x.size(); ++i) {
    const double saved = x[i];
    x[i] = saved + h;
    const double up = loss(x);
    x[i] = saved - h;
    const double down = loss(x);
    x[i] = saved;
    compare((up - down) / (2 * h), ds[i]);
  }
  return {worst <= 1e-4,
          Fmt("%g entries, max relative error %.2e", static_cast<double>(checked), worst)};
}

ExperimentConfig ReductionConfig(Mode mode) {
  ExperimentConfig c;
  c.mode = mode;
  c.num_clients = 1;
  c.group_size = 1;
  c.privacy.sigma_s = 0.0;
  c.privacy.sigma_y = 0.0;
  c.dataset.train_count = 100;
  c.dataset.test_count = 20;
  c.epochs = 1;
  c.max_rounds = 20;
  c.seed = 5;
  return c;
}

std::vector<std::vector<uint8_t>> Trajectory(const ExperimentConfig& c) {
  Simulator sim(c);
  std::vector<std::vector<uint8_t>> out;
  for (int r = 0; r < sim.total_rounds(); ++r) {
    sim.RunRound();
    std::vector<uint8_t> bytes = SerializeParams(sim.state().lowers[0]);
    const std::vector<uint8_t> upper = SerializeParams(sim.state().uppers[0]);
    bytes.insert(bytes.end(), upper.begin(), upper.end());
    out.push_back(std::move(bytes));
  }
  return out;
}

// 5. n = 1 reductions and the noiseless partition copy.
Outcome ReductionIdentities() {
  const auto plain = Trajectory(ReductionConfig(Mode::kPlainSl));
  int identical = 0;
  const Mode modes[] = {Mode::kDpSl, Mode::kDpMixSl, Mode::kDpCutMixSl,
                        Mode::kVanillaCutMix};
  for (Mode m : modes) identical += Trajectory(ReductionConfig(m)) == plain;
  const bool a = identical == 4 && plain.size() == 20;

  ExperimentConfig c = ReductionConfig(Mode::kDpCutMixSl);
  c.num_clients = 10;
  c.group_size = 10;
  c.dataset.train_count = 200;
  c.max_rounds = 3;
  Simulator sim(c);
  size_t mismatches = 0, rows = 0;
  for (int r = 0; r < 3; ++r) {
    sim.RunRound();
    const RoundTrace& t = sim.last_trace();
    for (size_t i = 0; i < t.server_items.size(); ++i) {
      const MixedBatchItem& item = t.server_items[i];
      const size_t b = i % static_cast<size_t>(c.batch_size);
      std::set<int> covered;
      for (const Contributor& k : item.contributors) {
        const Tensor& src = t.clamped.at(k.client_id)[b];
        for (int row : k.mask.selected) {
          ++rows;
          if (!covered.insert(row).second) ++mismatches;
          for (size_t col = 0; col < src.cols(); ++col) {
            if (item.smashed.patches(row, col) != src(row, col)) {
              ++mismatches;
              break;
            }
          }
        }
      }
      if (covered.size() != static_cast<size_t>(c.model.num_patches())) ++mismatches;
    }
  }
  const bool b = mismatches == 0 && rows > 0;
  return {a && b, Fmt("(a) %g/4 mix modes bit-identical to plain SL over %g rounds; "
                      "(b) %g patch rows copied, %g mismatches",
                      identical, static_cast<double>(plain.size()),
                      static_cast<double>(rows), static_cast<double>(mismatches))};
}

// 6. Noiseless desk-scale accuracy ordering.
Outcome UtilityTrend() {
  const Mode modes[] = {Mode::kPlainSl,        Mode::kDpSl,
                        Mode::kDpMixSl,        Mode::kDpCutMixSl,
                        Mode::kVanillaCutMix,  Mode::kStandalone,
                        Mode::kStandaloneCutout};
  std::map<Mode, double> mean;
  for (Mode m : modes) {
    double sum = 0.0;
    for (uint64_t seed = 1; seed <= 3; ++seed) {
      ExperimentConfig c;
      c.mode = m;
      c.num_clients = 10;
      c.group_size = 2;
      c.epochs = 30;
      c.seed = seed;
      c.privacy.sigma_s = 0.0;
      c.privacy.sigma_y = 0.0;
      sum += RunExperiment(c).final_accuracy;
    }
    mean[m] = sum / 3.0;
  }
  bool above_chance = true;
  std::string detail;
  for (Mode m : modes) {
    above_chance = above_chance && mean[m] >= 0.25 + 0.15;
    detail += ModeName(m) + "=" + Fmt("%.3f", mean[m]) + " ";
  }
  const double cutmix = mean[Mode::kDpCutMixSl];
  const bool beats = cutmix >= mean[Mode::kStandalone] &&
                     cutmix >= mean[Mode::kStandaloneCutout];
  return {beats && above_chance, "mean test accuracy over 3 seeds (g=2): " + detail};
}

// 7. Budgets shrink as the mixing group grows.
Outcome GroupSizeMonotonicity() {
  ExperimentConfig base;
  base.num_clients = 8;
  std::vector<RdpReport> reports;
  for (double g : {1.0, 2.0, 4.0, 8.0}) {
    reports.push_back(ConfigRdpReport(ApplySweepValue(base, SweepAxis::kGroupSize, g)));
  }
  bool ok = true;
  std::string detail;
  for (size_t i = 0; i < reports.size(); ++i) {
    if (i > 0) {
      ok = ok && reports[i].eps_mix < reports[i - 1].eps_mix &&
           reports[i].eps_cutmix < reports[i - 1].eps_cutmix;
    }
    detail += Fmt("g=%g: mix=%.4g cutmix=%.4g; ", 1 << i, reports[i].eps_mix,
                  reports[i].eps_cutmix);
  }
  return {ok, detail};
}

// 8. Sparse uplink payload tracks the mask size.
Outcome CommunicationReduction() {
  ExperimentConfig c;
  c.num_clients = 10;
  c.group_size = 10;
  c.model.patch_size = 2;  // 16×16 images, 64 patches.
  c.max_rounds = 3;
  c.dataset.train_count = 200;
  const size_t n = static_cast<size_t>(c.model.num_patches());
  const size_t d = static_cast<size_t>(c.model.embed_dim);
  const size_t batch = static_cast<size_t>(c.batch_size);
  const double dense_values = static_cast<double>(batch * n * d * 8);
  Simulator sim(c);
  double worst_overhead = -1e300, least_overhead = 1e300;
  int exact = 0, checks = 0;
  for (int r = 0; r < c.max_rounds; ++r) {
    sim.RunRound();
    std::map<int, size_t> kept;  // Patch rows per client over the batch.
    std::map<int, size_t> expected;
    for (const MixedBatchItem& item : sim.last_trace().server_items) {
      for (const Contributor& k : item.contributors) {
        const size_t rows = k.mask.selected.size();
        kept[k.client_id] += rows;
        expected[k.client_id] +=
            12 + (rows == n ? rows * d * 8 : rows * (2 + d * 8));
      }
    }
    for (const auto& [key, e] : sim.transport().log().entries()) {
      if (std::get<0>(key) != static_cast<uint32_t>(r + 1) ||
          std::get<1>(key) != MessageKind::kSmashedUp) {
        continue;
      }
      const int client = std::get<2>(key);
      ++checks;
      exact += e.payload_bytes == 4 + expected[client];
      // Fraction of the batch's patch rows kept, times the dense payload.
      const double ideal =
          static_cast<double>(kept[client]) / static_cast<double>(batch * n) *
          dense_values;
      const double overhead = static_cast<double>(e.payload_bytes) - ideal;
      worst_overhead = std::max(worst_overhead, overhead);
      least_overhead = std::min(least_overhead, overhead);
    }
  }
  const CommReport report = ComputeCommReport(sim.transport().log(), c);
  // Framing: 4 + 12 per item plus a 2-byte index per kept row.
  const double allowed = 4 + 12.0 * batch + 2.0 * batch * n;
  const bool ok = exact == checks && checks == 10 * c.max_rounds &&
                  least_overhead >= 0.0 && worst_overhead <= allowed && report.reduction_factor >= 9.0;
  return {ok, Fmt("mean uplink %.1f B vs dense %.1f B, reduction %.3fx, "
                  "framing overhead at most %.0f B per message",
                  report.mean_uplink_payload, report.dense_payload,
                  report.reduction_factor, worst_overhead)};
}

// 9. Reconstruction error ordering across schemes.
Outcome LeakageOrdering() {
  ExperimentConfig c;
  const LeakageReport report = RunLeakageSweep(c);
  bool ok = c.attack.num_seeds >= 3;
  std::string detail;
  for (double f : c.attack.train_fractions) {
    const double raw = report.Median(LeakageScheme::kRawSmashed, f);
    const double mix = report.Median(LeakageScheme::kMixup, f);
    const double cut = report.Median(LeakageScheme::kPatchCutMix, f);
    const double cutout = report.Median(LeakageScheme::kCutout, f);
    ok = ok && raw < mix && raw < cut && cut < cutout;
    detail += Fmt("fraction %g: raw=%.4f mixup=%.4f patch_cutmix=%.4f ", f, raw,
                  mix, cut) +
              Fmt("cutout=%.4f (cutmix-mixup gap %+.4f); ", cutout, cut - mix);
  }
  return {ok, detail};
}

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 10. Two runs with the same config write identical files.
Outcome Determinism() {
  const fs::path root = fs::temp_directory_path() / "splitmix_acceptance_det";
  fs::remove_all(root);
  ExperimentConfig c;
  c.mode = Mode::kDpCutMixSl;
  c.lambda.mode = LambdaMode::kDirichlet;
  c.group_size = 5;
  c.seed = 99;
  std::vector<std::string> outputs[2];
  for (int k = 0; k < 2; ++k) {
    c.output_dir = (root / std::to_string(k)).string();
    WriteRunOutputs(c, RunExperiment(c));
    for (const char* f : {"metrics.csv", "traffic.csv", "rdp.json"}) {
      outputs[k].push_back(ReadFile(fs::path(c.output_dir) / f));
    }
  }
  bool ok = outputs[0] == outputs[1];
  for (const std::string& s : outputs[0]) ok = ok && !s.empty();
  fs::remove_all(root);
  return {ok, ok ? "metrics.csv, traffic.csv and rdp.json byte-identical"
                 : "outputs differ"};
}

}  // namespace
}  // namespace splitmix

// With an argument k, runs only criterion k.
int main(int argc, char** argv) {
  const int only = argc > 1 ? std::atoi(argv[1]) : 0;
  using splitmix::Outcome;
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"RDP closed-form oracle", splitmix::RdpOracle},
      {"budget ordering property", splitmix::OrderingProperty},
      {"mask partition property", splitmix::MaskPartition},
      {"gradient fidelity", splitmix::GradientFidelity},
      {"reduction identities", splitmix::ReductionIdentities},
      {"desk-scale utility trend", splitmix::UtilityTrend},
      {"group-size budget monotonicity", splitmix::GroupSizeMonotonicity},
      {"communication reduction", splitmix::CommunicationReduction},
      {"leakage ordering", splitmix::LeakageOrdering},
      {"determinism", splitmix::Determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    if (only != 0 && index != only) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    failures += !o.pass;
    std::printf("%s criterion %d: %s: %s [%.1fs]\n", o.pass ? "PASS" : "FAIL",
                index, name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
