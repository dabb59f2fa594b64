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

#include "mgrs/evaluate.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mgrs/metrics.hpp"
#include "mgrs/threading.hpp"

namespace mgrs {

namespace {

int64_t reflect_index(int64_t i, int64_t n) {
  // Mirror without repeating the edge sample; n >= 2 for any padded axis.
  if (i < n) return i;
  const int64_t r = 2 * n - 2 - i;
  return r < 0 ? 0 : r;
}

Image pad_reflect(const Image& img, int64_t target_h, int64_t target_w) {
  if (img.h == target_h && img.w == target_w) return img;
  Image out(target_h, target_w);
  for (int64_t c = 0; c < 3; ++c)
    for (int64_t y = 0; y < target_h; ++y)
      for (int64_t x = 0; x < target_w; ++x)
        out.at(c, y, x) = img.at(c, reflect_index(y, img.h), reflect_index(x, img.w));
  return out;
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += x;
  return acc / static_cast<double>(v.size());
}

}  // namespace

InferenceResult run_inference(const NetConfig& cfg, ParamSet& mask_params,
                              ParamSet& restore_params, const Image& degraded) {
  const int64_t d = cfg.restore_divisor();
  const int64_t ph = (degraded.h + d - 1) / d * d;
  const int64_t pw = (degraded.w + d - 1) / d * d;
  const Image padded = pad_reflect(degraded, ph, pw);
  const Tensor x = image_to_tensor(padded);

  MaskForwardResult mask_out = mask_forward(cfg, mask_params, x);
  RestoreForwardResult rest_out = restore_forward(cfg, restore_params, x, mask_out.prob_mask);
  const Tensor restored = ops::clamp01(rest_out.restored);

  InferenceResult out;
  out.restored = Image(degraded.h, degraded.w);
  for (int64_t c = 0; c < 3; ++c)
    for (int64_t y = 0; y < degraded.h; ++y)
      for (int64_t x2 = 0; x2 < degraded.w; ++x2)
        out.restored.at(c, y, x2) = restored.at(0, c, y, x2);
  out.prob_mask = MaskImage(degraded.h, degraded.w);
  for (int64_t y = 0; y < degraded.h; ++y)
    for (int64_t x2 = 0; x2 < degraded.w; ++x2)
      out.prob_mask.at(y, x2) = mask_out.prob_mask.at(0, 0, y, x2);
  return out;
}

EvalRow evaluate_one(const NetConfig& cfg, ParamSet& mask_params, ParamSet& restore_params,
                     const ImageTriple& triple, const std::string& id) {
  EvalRow row;
  row.id = id;
  const InferenceResult inf = run_inference(cfg, mask_params, restore_params, triple.degraded);
  row.psnr_in = psnr(triple.degraded, triple.clean);
  row.psnr_out = psnr(inf.restored, triple.clean);
  row.ssim_in = ssim(triple.degraded, triple.clean);
  row.ssim_out = ssim(inf.restored, triple.clean);
  row.iou = mask_iou(inf.prob_mask, triple.mask);
  return row;
}

void MetricReport::finalize() {
  std::vector<double> pin, pout, sin_, sout, ious;
  evaluated = 0;
  failed = 0;
  for (const EvalRow& r : rows) {
    if (!r.ok) {
      ++failed;
      continue;
    }
    ++evaluated;
    pin.push_back(r.psnr_in);
    pout.push_back(r.psnr_out);
    sin_.push_back(r.ssim_in);
    sout.push_back(r.ssim_out);
    ious.push_back(r.iou);
  }
  mean_psnr_in = mean_of(pin);
  median_psnr_in = median_of(pin);
  mean_psnr_out = mean_of(pout);
  median_psnr_out = median_of(pout);
  mean_ssim_in = mean_of(sin_);
  median_ssim_in = median_of(sin_);
  mean_ssim_out = mean_of(sout);
  median_ssim_out = median_of(sout);
  mean_iou = mean_of(ious);
  median_iou = median_of(ious);
}

void MetricReport::write_csv(const std::string& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write report " + path);
  out << "id,status,psnr_in,psnr_out,ssim_in,ssim_out,iou\n";
  char buf[256];
  for (const EvalRow& r : rows) {
    if (!r.ok) {
      out << r.id << ",error:" << r.error << ",,,,,\n";
      continue;
    }
    std::snprintf(buf, sizeof(buf), "%s,ok,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.id.c_str(),
                  r.psnr_in, r.psnr_out, r.ssim_in, r.ssim_out, r.iou);
    out << buf;
  }
  std::snprintf(buf, sizeof(buf), "mean,,%.17g,%.17g,%.17g,%.17g,%.17g\n", mean_psnr_in,
                mean_psnr_out, mean_ssim_in, mean_ssim_out, mean_iou);
  out << buf;
  std::snprintf(buf, sizeof(buf), "median,,%.17g,%.17g,%.17g,%.17g,%.17g\n", median_psnr_in,
                median_psnr_out, median_ssim_in, median_ssim_out, median_iou);
  out << buf;
}

std::string MetricReport::summary() const {
  std::ostringstream ss;
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "%lld images (%lld failed)\n"
                "  PSNR  degraded %.3f dB -> restored %.3f dB (median %.3f)\n"
                "  SSIM  degraded %.4f    -> restored %.4f (median %.4f)\n"
                "  mask IoU %.4f (median %.4f)\n",
                static_cast<long long>(evaluated), static_cast<long long>(failed), mean_psnr_in,
                mean_psnr_out, median_psnr_out, mean_ssim_in, mean_ssim_out, median_ssim_out,
                mean_iou, median_iou);
  ss << buf;
  return ss.str();
}

MetricReport evaluate_dataset(const NetConfig& cfg, ParamSet& mask_params,
                              ParamSet& restore_params, const Dataset& data, int threads) {
  MetricReport report;
  report.rows.resize(data.size());
  parallel_for(static_cast<int64_t>(data.size()), threads, [&](int64_t i) {
    report.rows[static_cast<size_t>(i)] = evaluate_one(
        cfg, mask_params, restore_params, data.items[static_cast<size_t>(i)], data.ids[i]);
  });
  report.finalize();
  return report;
}

MetricReport evaluate_dir(const NetConfig& cfg, ParamSet& mask_params, ParamSet& restore_params,
                          const std::string& dir, int threads) {
  const std::vector<std::string> ids = list_triple_ids(dir);
  MetricReport report;
  report.rows.resize(ids.size());
  parallel_for(static_cast<int64_t>(ids.size()), threads, [&](int64_t i) {
    const std::string& id = ids[static_cast<size_t>(i)];
    EvalRow& row = report.rows[static_cast<size_t>(i)];
    try {
      const ImageTriple triple = read_triple(dir, id);
      row = evaluate_one(cfg, mask_params, restore_params, triple, id);
    } catch (const std::exception& e) {
      row.id = id;
      row.ok = false;
      row.error = e.what();
    }
  });
  report.finalize();
  return report;
}

}  // namespace mgrs
