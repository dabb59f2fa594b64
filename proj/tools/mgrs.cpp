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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "mgrs/checkpoint.hpp"
#include "mgrs/config.hpp"
#include "mgrs/data.hpp"
#include "mgrs/evaluate.hpp"
#include "mgrs/image_io.hpp"
#include "mgrs/kernels.hpp"
#include "mgrs/threading.hpp"
#include "mgrs/train.hpp"
#include "mgrs/verify.hpp"

namespace {

namespace fs = std::filesystem;
using namespace mgrs;

// The one permitted environment read: a parallelism hint that never changes
// numerical results (per-image work only, fixed-order aggregation).
int thread_hint() {
  const char* env = std::getenv("MGRS_THREADS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

struct CommonOpts {
  std::string config_path;
  int64_t seed = -1;
  int64_t epochs = -1;

  Config resolve() const {
    Config cfg = config_path.empty() ? Config{} : Config::load(config_path);
    if (seed >= 0) cfg.seed = static_cast<uint64_t>(seed);
    if (epochs >= 0) cfg.epochs = epochs;
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--config", opts.config_path, "key=value config file");
  cmd->add_option("--seed", opts.seed, "override the config seed");
  cmd->add_option("--epochs", opts.epochs, "override the config epoch count");
}

void apply_backend(const Config& cfg) {
  kernels::set_backend(kernels::backend_from_string(cfg.simd));
}

int cmd_gen_data(const Config& cfg, const std::string& out_dir, int64_t count,
                 int64_t test_count, int64_t size, const std::string& kind) {
  if (count < 1 || size < 16) throw ContractError("gen-data: need count >= 1 and size >= 16");
  if (test_count < 0) test_count = std::max<int64_t>(1, count / 8);
  if (kind != "rain" && kind != "blur" && kind != "mix")
    throw ContractError("gen-data: kind must be rain|blur|mix");

  const int threads = thread_hint();
  const Rng base(cfg.seed);

  auto make_triple = [&](Rng sample_rng, int64_t index) {
    Image clean = gen_clean_image(sample_rng, size, size);
    const bool use_blur = kind == "blur" || (kind == "mix" && index % 2 == 1);
    ImageTriple t;
    if (use_blur) {
      BlurParams bp;
      const int64_t side = size / 4 + sample_rng.next_index(size / 4 + 1);
      bp.x0 = sample_rng.next_index(size - side);
      bp.y0 = sample_rng.next_index(size - side);
      bp.x1 = bp.x0 + side;
      bp.y1 = bp.y0 + side;
      bp.kernel_length = 9;
      bp.kernel_angle_deg = sample_rng.uniform(0.0, 180.0);
      bp.seed = sample_rng.next_u64();
      DegradedPair pair = synth_regional_blur(clean, bp);
      t = {std::move(pair.degraded), std::move(clean), std::move(pair.mask)};
    } else {
      RainParams rp;
      rp.seed = sample_rng.next_u64();
      DegradedPair pair = synth_rain(clean, rp);
      t = {std::move(pair.degraded), std::move(clean), std::move(pair.mask)};
    }
    return t;
  };

  auto emit_split = [&](const std::string& split, int64_t n) {
    const std::string dir = out_dir + "/" + split;
    fs::create_directories(dir);
    const Rng stream = base.fork("gen-" + split);
    parallel_for(n, threads, [&](int64_t i) {
      char id[24];
      std::snprintf(id, sizeof(id), "%04lld", static_cast<long long>(i));
      write_triple(dir, id, make_triple(stream.at_index(static_cast<uint64_t>(i)), i));
    });
  };

  emit_split("train", count);
  emit_split("test", test_count);
  std::printf("wrote %lld train / %lld test triples (%lldx%lld, kind=%s) to %s\n",
              static_cast<long long>(count), static_cast<long long>(test_count),
              static_cast<long long>(size), static_cast<long long>(size), kind.c_str(),
              out_dir.c_str());
  return 0;
}

int cmd_train_mask(const Config& cfg, const std::string& resume_path) {
  Dataset train = load_dataset(cfg.data_dir + "/train", cfg.patch);
  Dataset test = load_dataset(cfg.data_dir + "/test");
  Checkpoint resume;
  const Checkpoint* resume_ptr = nullptr;
  if (!resume_path.empty()) {
    resume = load_checkpoint(resume_path);
    resume_ptr = &resume;
  }
  StageOutput out = train_mask_stage(cfg, train, test, cfg.out_dir, resume_ptr);
  std::printf("stage 1 done: final bce %.6f, test IoU %.4f -> %s/mask.ckpt\n",
              out.log.rows.back().loss_main, out.log.rows.back().iou, cfg.out_dir.c_str());
  return 0;
}

int cmd_train_restore(const Config& cfg, const std::string& mask_ckpt_path,
                      const std::string& resume_path) {
  Dataset train = load_dataset(cfg.data_dir + "/train", cfg.patch);
  Dataset test = load_dataset(cfg.data_dir + "/test");
  Checkpoint mask_ckpt = load_checkpoint(mask_ckpt_path);
  Checkpoint resume;
  const Checkpoint* resume_ptr = nullptr;
  if (!resume_path.empty()) {
    resume = load_checkpoint(resume_path);
    resume_ptr = &resume;
  }
  StageOutput out = train_restore_stage(cfg, train, test, mask_ckpt, cfg.out_dir, resume_ptr);
  std::printf("stage 2 done: final l1 %.6f, test PSNR %.3f dB -> %s/restore.ckpt\n",
              out.log.rows.back().loss_main, out.log.rows.back().psnr, cfg.out_dir.c_str());
  return 0;
}

int cmd_infer(const Config& cfg, const std::string& mask_ckpt_path,
              const std::string& restore_ckpt_path, const std::string& input_path,
              const std::string& out_dir) {
  const NetConfig net = cfg.net();
  Checkpoint mask_ckpt = load_checkpoint(mask_ckpt_path);
  Checkpoint restore_ckpt = load_checkpoint(restore_ckpt_path);
  ParamSet mask_params = mask_ckpt.params;
  ParamSet net_params = restore_ckpt.params.subset("net.");
  if (net_params.size() == 0)
    throw ContractError("infer: restore checkpoint has no net.* parameters");

  const Image degraded = read_ppm(input_path);
  const InferenceResult result = run_inference(net, mask_params, net_params, degraded);

  fs::create_directories(out_dir);
  const std::string stem = fs::path(input_path).stem().string();
  const std::string mask_out = out_dir + "/" + stem + "_mask.ppm";
  const std::string restored_out = out_dir + "/" + stem + "_restored.ppm";
  write_ppm_mask(mask_out, result.prob_mask);
  write_ppm(restored_out, result.restored);
  std::printf("wrote %s and %s\n", mask_out.c_str(), restored_out.c_str());
  return 0;
}

int cmd_eval(const Config& cfg, const std::string& mask_ckpt_path,
             const std::string& restore_ckpt_path, const std::string& data_dir,
             const std::string& report_path) {
  const NetConfig net = cfg.net();
  Checkpoint mask_ckpt = load_checkpoint(mask_ckpt_path);
  Checkpoint restore_ckpt = load_checkpoint(restore_ckpt_path);
  ParamSet mask_params = mask_ckpt.params;
  ParamSet net_params = restore_ckpt.params.subset("net.");
  if (net_params.size() == 0)
    throw ContractError("eval: restore checkpoint has no net.* parameters");

  MetricReport report = evaluate_dir(net, mask_params, net_params, data_dir, thread_hint());
  if (!report_path.empty()) report.write_csv(report_path);
  std::fputs(report.summary().c_str(), stdout);
  return report.failed > 0 ? 1 : 0;
}

int cmd_gradcheck() {
  VerifyReport report = run_gradient_suite();
  for (const VerifyEntry& e : report.entries) {
    std::printf("%-42s %s  max rel err %.3e (tol %.0e, %lld coords)%s%s\n", e.name.c_str(),
                e.pass ? "PASS" : "FAIL", e.max_rel_err, e.tolerance,
                static_cast<long long>(e.coords), e.diagnostic.empty() ? "" : "  ",
                e.diagnostic.c_str());
  }
  std::printf("gradient suite: %s (%.1fs, backend %s)\n",
              report.all_pass() ? "all checks passed" : "FAILURES", report.seconds,
              kernels::active().name);
  return report.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mgrs: two-stage mask-guided image restoration"};
  app.require_subcommand(1);

  CommonOpts gen_opts, tm_opts, tr_opts, infer_opts, eval_opts;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic degradation dataset");
  std::string gen_out = "data";
  int64_t gen_count = 128, gen_test_count = -1, gen_size = 64;
  std::string gen_kind = "rain";
  add_common(gen, gen_opts);
  gen->add_option("--out", gen_out, "output dataset directory");
  gen->add_option("--count", gen_count, "number of training triples");
  gen->add_option("--test-count", gen_test_count, "test triples (default count/8)");
  gen->add_option("--size", gen_size, "image side length");
  gen->add_option("--kind", gen_kind, "degradation: rain|blur|mix");

  auto* tm = app.add_subcommand("train-mask", "stage 1: train the mask predictor");
  std::string tm_data, tm_out, tm_resume;
  add_common(tm, tm_opts);
  tm->add_option("--data", tm_data, "dataset directory (train/ + test/)");
  tm->add_option("--out", tm_out, "output directory");
  tm->add_option("--resume", tm_resume, "checkpoint to resume from");

  auto* tr = app.add_subcommand("train-restore", "stage 2: train the restoration network");
  std::string tr_data, tr_out, tr_mask, tr_resume;
  add_common(tr, tr_opts);
  tr->add_option("--data", tr_data, "dataset directory (train/ + test/)");
  tr->add_option("--out", tr_out, "output directory");
  tr->add_option("--mask-ckpt", tr_mask, "stage-1 checkpoint")->required();
  tr->add_option("--resume", tr_resume, "checkpoint to resume from");

  auto* inf = app.add_subcommand("infer", "restore one image");
  std::string inf_mask, inf_restore, inf_input, inf_out = ".";
  add_common(inf, infer_opts);
  inf->add_option("--mask-ckpt", inf_mask)->required();
  inf->add_option("--restore-ckpt", inf_restore)->required();
  inf->add_option("--input", inf_input, "degraded PPM image")->required();
  inf->add_option("--out-dir", inf_out, "directory for mask + restored outputs");

  auto* ev = app.add_subcommand("eval", "evaluate checkpoints on a test directory");
  std::string ev_mask, ev_restore, ev_data, ev_report;
  add_common(ev, eval_opts);
  ev->add_option("--mask-ckpt", ev_mask)->required();
  ev->add_option("--restore-ckpt", ev_restore)->required();
  ev->add_option("--data", ev_data, "directory of triples")->required();
  ev->add_option("--report", ev_report, "metric report CSV path");

  auto* gc = app.add_subcommand("gradcheck", "run the finite-difference verification suite");
  std::string gc_simd = "auto";
  gc->add_option("--simd", gc_simd, "kernel backend: auto|scalar|avx2");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints usage
    return 1;
  }

  try {
    if (gen->parsed()) {
      Config cfg = gen_opts.resolve();
      cfg.validate();
      apply_backend(cfg);
      return cmd_gen_data(cfg, gen_out, gen_count, gen_test_count, gen_size, gen_kind);
    }
    if (tm->parsed()) {
      Config cfg = tm_opts.resolve();
      if (!tm_data.empty()) cfg.data_dir = tm_data;
      if (!tm_out.empty()) cfg.out_dir = tm_out;
      cfg.validate();
      apply_backend(cfg);
      return cmd_train_mask(cfg, tm_resume);
    }
    if (tr->parsed()) {
      Config cfg = tr_opts.resolve();
      if (!tr_data.empty()) cfg.data_dir = tr_data;
      if (!tr_out.empty()) cfg.out_dir = tr_out;
      cfg.validate();
      apply_backend(cfg);
      return cmd_train_restore(cfg, tr_mask, tr_resume);
    }
    if (inf->parsed()) {
      Config cfg = infer_opts.resolve();
      cfg.validate();
      apply_backend(cfg);
      return cmd_infer(cfg, inf_mask, inf_restore, inf_input, inf_out);
    }
    if (ev->parsed()) {
      Config cfg = eval_opts.resolve();
      cfg.validate();
      apply_backend(cfg);
      return cmd_eval(cfg, ev_mask, ev_restore, ev_data, ev_report);
    }
    if (gc->parsed()) {
      kernels::set_backend(kernels::backend_from_string(gc_simd));
      return cmd_gradcheck();
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
