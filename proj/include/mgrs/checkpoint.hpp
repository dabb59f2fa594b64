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

#include "mgrs/tensor.hpp"

namespace mgrs {

// Binary "MGRS" checkpoint, version 1, all integers and doubles little
// endian. Layout:
//   magic "MGRS" | u32 version | u64 config_hash | u32 epoch | u8 has_adam
//   u32 n_params | n_params x { u32 name_len, name, 4 x u32 shape,
//                               u64 count, count x f64 }
//   if has_adam: u64 t | f64 beta1 beta2 eps | n_params x { count x f64 m,
//                                                           count x f64 v }
// load(save(x)) is bit-identical; version mismatch, bad magic and
// blob-length disagreements are hard errors.
struct Checkpoint {
  static constexpr uint32_t kVersion = 1;

  uint64_t config_hash = 0;
  uint32_t epoch = 0;
  ParamSet params;

  bool has_adam = false;
  uint64_t adam_t = 0;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::vector<Tensor> adam_m;  // aligned with params order
  std::vector<Tensor> adam_v;
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace mgrs
