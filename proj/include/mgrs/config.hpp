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
#include <string>

#include "mgrs/networks.hpp"

namespace mgrs {

/// Flat key=value configuration ('#' comments, UTF-8). Unknown keys are
/// rejected. Every key has the documented default below; the defaults
/// reproduce the desk-scale training gates with no file at all.
struct Config {
  int64_t levels = 3;
  int64_t mask_base_channels = 8;
  int64_t restore_base_channels = 16;
  bool gated_decoder = true;
  double tau = 0.05;             // GT mask threshold
  double lambda_distill = 0.1;   // weight of R in stage-2 loss
  double lr0 = 1e-4;
  int64_t lr_half_every = 50;    // epochs
  int64_t patch = 64;
  int64_t batch = 4;
  int64_t epochs = 30;
  uint64_t seed = 7;
  std::string data_dir = "data";
  std::string out_dir = "out";
  std::string simd = "auto";  // auto|scalar|avx2

  /// Parses a config file over the defaults. IoError for unknown keys or
  /// unparsable values.
  static Config load(const std::string& path);
  void apply(const std::string& key, const std::string& value);

  void validate() const;

  /// Hash of the keys that shape the per-step trajectory. Machine-local
  /// paths, the simd backend (never changes numerics) and epochs (a stop
  /// point) are excluded. Stored in checkpoints and required to match when
  /// resuming.
  uint64_t hash() const;
  std::string canonical_text() const;

  NetConfig net() const {
    return NetConfig{levels, mask_base_channels, restore_base_channels, gated_decoder};
  }
};

}  // namespace mgrs
