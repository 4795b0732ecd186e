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

#ifndef SPLITMIX_GRAD_CHECK_H_
#define SPLITMIX_GRAD_CHECK_H_

#include <functional>

#include "splitmix/tensor.h"

namespace splitmix {

struct GradCheckReport {
  bool passed = false;
  double max_relative_error = 0.0;
  size_t worst_index = 0;
  double analytic_at_worst = 0.0;
  double numeric_at_worst = 0.0;
};

// Compares grad_f(x) with central differences coordinate by coordinate.
// Relative error is |a - n| / (|a| + |n| + 1e-12).
GradCheckReport FiniteDiffCheck(
    const std::function<double(const Tensor&)>& f,
    const std::function<Tensor(const Tensor&)>& grad_f, const Tensor& x,
    double h, double tol);

}  // namespace splitmix

#endif  // SPLITMIX_GRAD_CHECK_H_
