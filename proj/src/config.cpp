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

#include "mgrs/config.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "mgrs/common.hpp"

namespace mgrs {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

int64_t parse_int(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const int64_t r = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw IoError("config: bad integer for " + key + ": '" + v + "'");
  }
}

uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const uint64_t r = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw IoError("config: bad unsigned integer for " + key + ": '" + v + "'");
  }
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double r = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return r;
  } catch (const std::exception&) {
    throw IoError("config: bad number for " + key + ": '" + v + "'");
  }
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw IoError("config: bad boolean for " + key + ": '" + v + "' (true|false)");
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void Config::apply(const std::string& key, const std::string& value) {
  if (key == "levels") levels = parse_int(key, value);
  else if (key == "mask_base_channels") mask_base_channels = parse_int(key, value);
  else if (key == "restore_base_channels") restore_base_channels = parse_int(key, value);
  else if (key == "gated_decoder") gated_decoder = parse_bool(key, value);
  else if (key == "tau") tau = parse_double(key, value);
  else if (key == "lambda_distill") lambda_distill = parse_double(key, value);
  else if (key == "lr0") lr0 = parse_double(key, value);
  else if (key == "lr_half_every") lr_half_every = parse_int(key, value);
  else if (key == "patch") patch = parse_int(key, value);
  else if (key == "batch") batch = parse_int(key, value);
  else if (key == "epochs") epochs = parse_int(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "data_dir") data_dir = value;
  else if (key == "out_dir") out_dir = value;
  else if (key == "simd") simd = value;
  else throw IoError("config: unknown key '" + key + "'");
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path);
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw IoError("config " + path + ":" + std::to_string(lineno) + ": expected key=value");
    cfg.apply(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void Config::validate() const {
  net().validate();
  if (!(tau > 0.0 && tau < 1.0)) throw ContractError("config: tau must be in (0,1)");
  if (lambda_distill < 0.0) throw ContractError("config: lambda_distill must be >= 0");
  if (lr0 <= 0.0) throw ContractError("config: lr0 must be positive");
  if (lr_half_every < 1) throw ContractError("config: lr_half_every must be >= 1");
  if (patch < 1 || batch < 1 || epochs < 1)
    throw ContractError("config: patch/batch/epochs must be positive");
  const int64_t d = net().restore_divisor();
  if (patch % d != 0)
    throw ContractError("config: patch must be divisible by " + std::to_string(d));
  if (simd != "auto" && simd != "scalar" && simd != "avx2")
    throw ContractError("config: simd must be auto|scalar|avx2");
}

std::string Config::canonical_text() const {
  // epochs is a stop point, not a per-step hyperparameter: resuming a run
  // with a larger epoch budget must hash-match its checkpoints.
  std::string s;
  s += "batch=" + std::to_string(batch) + "\n";
  s += "gated_decoder=" + std::string(gated_decoder ? "true" : "false") + "\n";
  s += "lambda_distill=" + fmt_double(lambda_distill) + "\n";
  s += "levels=" + std::to_string(levels) + "\n";
  s += "lr0=" + fmt_double(lr0) + "\n";
  s += "lr_half_every=" + std::to_string(lr_half_every) + "\n";
  s += "mask_base_channels=" + std::to_string(mask_base_channels) + "\n";
  s += "patch=" + std::to_string(patch) + "\n";
  s += "restore_base_channels=" + std::to_string(restore_base_channels) + "\n";
  s += "seed=" + std::to_string(seed) + "\n";
  s += "tau=" + fmt_double(tau) + "\n";
  return s;
}

uint64_t Config::hash() const { return fnv1a64(canonical_text()); }

}  // namespace mgrs
