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

#include "mgrs/data.hpp"
#include "mgrs/networks.hpp"

namespace mgrs {

struct EvalRow {
  std::string id;
  bool ok = true;
  std::string error;
  double psnr_in = 0.0;   // degraded vs clean
  double psnr_out = 0.0;  // restored vs clean
  double ssim_in = 0.0;
  double ssim_out = 0.0;
  double iou = 0.0;  // predicted vs GT mask
};

struct MetricReport {
  std::vector<EvalRow> rows;
  int64_t evaluated = 0;
  int64_t failed = 0;
  double mean_psnr_in = 0.0, median_psnr_in = 0.0;
  double mean_psnr_out = 0.0, median_psnr_out = 0.0;
  double mean_ssim_in = 0.0, median_ssim_in = 0.0;
  double mean_ssim_out = 0.0, median_ssim_out = 0.0;
  double mean_iou = 0.0, median_iou = 0.0;

  /// Recomputes aggregates from the ok rows.
  void finalize();
  void write_csv(const std::string& path) const;
  std::string summary() const;
};

/// Reflect-pads to the network divisor, runs mask prediction and
/// restoration, crops back. The restored image is clamped to [0,1].
struct InferenceResult {
  Image restored;
  MaskImage prob_mask;
};
InferenceResult run_inference(const NetConfig& cfg, ParamSet& mask_params,
                              ParamSet& restore_params, const Image& degraded);

EvalRow evaluate_one(const NetConfig& cfg, ParamSet& mask_params, ParamSet& restore_params,
                     const ImageTriple& triple, const std::string& id);

/// Per-image work may run on `threads` workers; rows and aggregates are
/// assembled in id order either way.
MetricReport evaluate_dataset(const NetConfig& cfg, ParamSet& mask_params,
                              ParamSet& restore_params, const Dataset& data, int threads = 1);

/// Directory variant: unreadable triples become failed rows (excluded from
/// aggregates) instead of aborting the run.
MetricReport evaluate_dir(const NetConfig& cfg, ParamSet& mask_params, ParamSet& restore_params,
                          const std::string& dir, int threads = 1);

}  // namespace mgrs
