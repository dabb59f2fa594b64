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

#include "mgrs/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace mgrs {

namespace {

// Loss value without recording anything.
double eval_loss(const std::function<Tensor()>& loss_builder) {
  Tensor loss = loss_builder();
  return loss.item();
}

}  // namespace

GradCheckResult gradcheck(ParamSet& params, const std::function<Tensor()>& loss_builder,
                          const GradCheckOptions& options) {
  GradCheckResult result;

  // Analytic pass.
  params.set_requires_grad(true);
  params.zero_grads();
  std::vector<std::vector<double>> analytic(params.size());
  {
    Tape tape;
    TapeScope scope(tape);
    Tensor loss = loss_builder();
    if (!std::isfinite(loss.item())) {
      result.finite = false;
      result.diagnostic = "non-finite loss at unperturbed parameters";
      return result;
    }
    tape.backward(loss);
    for (size_t p = 0; p < params.size(); ++p) {
      const Tensor& t = params.tensor(p);
      analytic[p].assign(t.grad(), t.grad() + t.numel());
    }
  }

  // Numeric sweep.
  Rng picker(options.sample_seed);
  const double h = options.step;
  for (size_t p = 0; p < params.size(); ++p) {
    Tensor& t = params.tensor(p);
    const int64_t numel = t.numel();
    std::vector<int64_t> coords;
    if (options.coords_per_param <= 0 || options.coords_per_param >= numel) {
      coords.resize(static_cast<size_t>(numel));
      for (int64_t i = 0; i < numel; ++i) coords[static_cast<size_t>(i)] = i;
    } else {
      for (int64_t i = 0; i < options.coords_per_param; ++i)
        coords.push_back(picker.next_index(numel));
      std::sort(coords.begin(), coords.end());
      coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    }

    for (int64_t i : coords) {
      double* slot = t.data() + i;
      const double original = *slot;
      *slot = original + h;
      const double lp = eval_loss(loss_builder);
      *slot = original - h;
      const double lm = eval_loss(loss_builder);
      *slot = original;
      if (!std::isfinite(lp) || !std::isfinite(lm)) {
        result.finite = false;
        result.diagnostic = "non-finite loss while perturbing " + params.name(p) +
                            " coordinate " + std::to_string(i);
        result.worst_param = params.name(p);
        result.worst_index = i;
        return result;
      }
      const double fd = (lp - lm) / (2.0 * h);
      const double g = analytic[p][static_cast<size_t>(i)];
      const double rel = std::abs(g - fd) / std::max({1.0, std::abs(g), std::abs(fd)});
      ++result.coords_checked;
      if (rel > result.max_rel_err) {
        result.max_rel_err = rel;
        result.worst_param = params.name(p);
        result.worst_index = i;
      }
    }
  }
  return result;
}

}  // namespace mgrs
