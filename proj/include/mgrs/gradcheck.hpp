// Copyright 2026 The mgrs Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <string>

#include "mgrs/tensor.hpp"

namespace mgrs {

struct GradCheckOptions {
  double step = 1e-5;  // central-difference half step
  // Coordinates checked per parameter tensor; <= 0 checks all of them.
  // Large graphs sample: a full sweep needs two forward passes per
  // coordinate.
  int64_t coords_per_param = -1;
  uint64_t sample_seed = 0x6d677273u;
};

struct GradCheckResult {
  double max_rel_err = 0.0;
  std::string worst_param;
  int64_t worst_index = -1;
  int64_t coords_checked = 0;
  bool finite = true;
  std::string diagnostic;

  bool pass(double tolerance) const { return finite && max_rel_err < tolerance; }
};

/// Compares tape gradients of a scalar loss against central finite
/// differences over the given parameters. loss_builder must be a pure,
/// deterministic function of the parameter values; it is re-run with
/// perturbed coordinates. Relative error uses a unit floor:
/// |g - fd| / max(1, |g|, |fd|).
GradCheckResult gradcheck(ParamSet& params, const std::function<Tensor()>& loss_builder,
                          const GradCheckOptions& options = {});

}  // namespace mgrs
