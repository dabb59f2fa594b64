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

#include <string>
#include <vector>

namespace mgrs {

/// Finite-difference verification of every differentiable operation plus the
/// composed stage-2 loss (L1 + lambda*R through gated blocks, regressors,
/// rho heads and alpha heads on a 16x16 input with 2 levels). Op checks run
/// at tolerance 1e-6, the end-to-end check at 1e-5.
struct VerifyEntry {
  std::string name;
  double max_rel_err = 0.0;
  double tolerance = 0.0;
  int64_t coords = 0;
  bool pass = false;
  std::string diagnostic;
};

struct VerifyReport {
  std::vector<VerifyEntry> entries;
  double seconds = 0.0;

  bool all_pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
};

VerifyReport run_gradient_suite();

}  // namespace mgrs
