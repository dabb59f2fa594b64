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

#include <cstdint>
#include <vector>

#include "mgrs/tensor.hpp"

namespace mgrs {

/// Adam with bias correction. Moments mirror the ParamSet order; step()
/// consumes the gradients stored on the parameters.
class AdamState {
 public:
  AdamState() = default;
  AdamState(double beta1, double beta2, double eps)
      : beta1_(beta1), beta2_(beta2), eps_(eps) {}

  void init(const ParamSet& params);
  bool initialized() const { return !m_.empty(); }

  /// One update over all parameters. lr must be positive; shapes must match
  /// the init()-time parameters.
  void step(ParamSet& params, double lr);

  uint64_t t() const { return t_; }
  double beta1() const { return beta1_; }
  double beta2() const { return beta2_; }
  double eps() const { return eps_; }

  // Checkpoint access; order matches the ParamSet passed to init().
  size_t count() const { return m_.size(); }
  Tensor& m(size_t i) { return m_[i]; }
  Tensor& v(size_t i) { return v_[i]; }
  const Tensor& m(size_t i) const { return m_[i]; }
  const Tensor& v(size_t i) const { return v_[i]; }
  void restore(uint64_t t, std::vector<Tensor> m, std::vector<Tensor> v);

 private:
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  uint64_t t_ = 0;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
};

}  // namespace mgrs
