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

#include "mgrs/adam.hpp"

#include <cmath>

#include "mgrs/kernels.hpp"

namespace mgrs {

void AdamState::init(const ParamSet& params) {
  m_.clear();
  v_.clear();
  t_ = 0;
  m_.reserve(params.size());
  v_.reserve(params.size());
  for (size_t i = 0; i < params.size(); ++i) {
    m_.emplace_back(params.tensor(i).shape());
    v_.emplace_back(params.tensor(i).shape());
  }
}

void AdamState::step(ParamSet& params, double lr) {
  if (lr <= 0.0) throw ContractError("adam: lr must be positive");
  if (params.size() != m_.size())
    throw ContractError("adam: parameter count changed since init");
  t_ += 1;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  const auto& k = kernels::active();
  for (size_t i = 0; i < params.size(); ++i) {
    Tensor& p = params.tensor(i);
    if (!(p.shape() == m_[i].shape()))
      throw ContractError("adam: shape mismatch for parameter " + params.name(i));
    if (!p.has_grad()) throw ContractError("adam: parameter has no gradient: " + params.name(i));
    k.adam_step(p.data(), m_[i].data(), v_[i].data(), p.grad(), p.numel(), lr, beta1_, beta2_,
                eps_, c1, c2);
  }
}

void AdamState::restore(uint64_t t, std::vector<Tensor> m, std::vector<Tensor> v) {
  if (m.size() != v.size()) throw ContractError("adam restore: m/v count mismatch");
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace mgrs
