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

#include "splitmix/grad_check.h"

#include <cmath>

#include "splitmix/error.h"

namespace splitmix {

GradCheckReport FiniteDiffCheck(
    const std::function<double(const Tensor&)>& f,
    const std::function<Tensor(const Tensor&)>& grad_f, const Tensor& x,
    double h, double tol) {
  const Tensor analytic = grad_f(x);
  if (!analytic.SameShape(x)) {
    ThrowShape("FiniteDiffCheck: gradient shape " + analytic.ShapeString() +
               " differs from input " + x.ShapeString());
  }
  GradCheckReport report;
  Tensor probe = x;
  for (size_t k = 0; k < x.size(); ++k) {
    const double original = probe[k];
    probe[k] = original + h;
    const double f_plus = f(probe);
    probe[k] = original - h;
    const double f_minus = f(probe);
    probe[k] = original;
    const double numeric = (f_plus - f_minus) / (2.0 * h);
    const double rel = std::abs(analytic[k] - numeric) /
                       (std::abs(analytic[k]) + std::abs(numeric) + 1e-12);
    if (k == 0 || rel > report.max_relative_error) {
      report.max_relative_error = rel;
      report.worst_index = k;
      report.analytic_at_worst = analytic[k];
      report.numeric_at_worst = numeric;
    }
  }
  report.passed = report.max_relative_error <= tol;
  return report;
}

}  // namespace splitmix
