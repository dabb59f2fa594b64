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

#include "mgrs/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace mgrs {

namespace {

constexpr char kMagic[4] = {'M', 'G', 'R', 'S'};

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

struct Reader {
  const std::string& bytes;
  size_t pos = 0;
  const std::string& path;

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError("checkpoint " + path + ": " + what + " at offset " + std::to_string(pos));
  }

  void need(size_t n) const {
    if (bytes.size() - pos < n) {
      throw IoError("checkpoint " + path + ": truncated at offset " + std::to_string(pos));
    }
  }

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 4;
    return v;
  }

  uint64_t u64() {
    need(8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[pos + i])) << (8 * i);
    pos += 8;
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  uint8_t u8() {
    need(1);
    return static_cast<uint8_t>(bytes[pos++]);
  }

  std::string str(size_t n) {
    need(n);
    std::string s = bytes.substr(pos, n);
    pos += n;
    return s;
  }

  void f64_block(double* dst, size_t count) {
    need(8 * count);
    for (size_t i = 0; i < count; ++i) {
      uint64_t v = 0;
      for (int b = 0; b < 8; ++b)
        v |= static_cast<uint64_t>(static_cast<unsigned char>(bytes[pos + 8 * i + b])) << (8 * b);
      dst[i] = std::bit_cast<double>(v);
    }
    pos += 8 * count;
  }
};

}  // namespace

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  if (ckpt.has_adam &&
      (ckpt.adam_m.size() != ckpt.params.size() || ckpt.adam_v.size() != ckpt.params.size()))
    throw ContractError("save_checkpoint: adam moment count does not match parameters");

  std::string out;
  out.append(kMagic, 4);
  put_u32(out, Checkpoint::kVersion);
  put_u64(out, ckpt.config_hash);
  put_u32(out, ckpt.epoch);
  out.push_back(ckpt.has_adam ? 1 : 0);
  put_u32(out, static_cast<uint32_t>(ckpt.params.size()));
  for (size_t i = 0; i < ckpt.params.size(); ++i) {
    const std::string& name = ckpt.params.name(i);
    const Tensor& t = ckpt.params.tensor(i);
    put_u32(out, static_cast<uint32_t>(name.size()));
    out += name;
    const Shape s = t.shape();
    put_u32(out, static_cast<uint32_t>(s.n));
    put_u32(out, static_cast<uint32_t>(s.c));
    put_u32(out, static_cast<uint32_t>(s.h));
    put_u32(out, static_cast<uint32_t>(s.w));
    put_u64(out, static_cast<uint64_t>(t.numel()));
    for (int64_t j = 0; j < t.numel(); ++j) put_f64(out, t.data()[j]);
  }
  if (ckpt.has_adam) {
    put_u64(out, ckpt.adam_t);
    put_f64(out, ckpt.adam_beta1);
    put_f64(out, ckpt.adam_beta2);
    put_f64(out, ckpt.adam_eps);
    for (size_t i = 0; i < ckpt.params.size(); ++i) {
      const Tensor& m = ckpt.adam_m[i];
      const Tensor& v = ckpt.adam_v[i];
      if (!(m.shape() == ckpt.params.tensor(i).shape()) ||
          !(v.shape() == ckpt.params.tensor(i).shape()))
        throw ContractError("save_checkpoint: adam moment shape mismatch at " +
                            ckpt.params.name(i));
      for (int64_t j = 0; j < m.numel(); ++j) put_f64(out, m.data()[j]);
      for (int64_t j = 0; j < v.numel(); ++j) put_f64(out, v.data()[j]);
    }
  }

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write checkpoint " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!f) throw IoError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r{bytes, 0, path};

  const std::string magic = r.str(4);
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    r.pos = 0;
    r.fail("bad magic");
  }
  const uint32_t version = r.u32();
  if (version != Checkpoint::kVersion)
    throw IoError("checkpoint " + path + ": version " + std::to_string(version) +
                  " unsupported (expected " + std::to_string(Checkpoint::kVersion) + ")");

  Checkpoint ckpt;
  ckpt.config_hash = r.u64();
  ckpt.epoch = r.u32();
  ckpt.has_adam = r.u8() != 0;
  const uint32_t n_params = r.u32();
  for (uint32_t i = 0; i < n_params; ++i) {
    const uint32_t name_len = r.u32();
    const std::string name = r.str(name_len);
    Shape s;
    s.n = r.u32();
    s.c = r.u32();
    s.h = r.u32();
    s.w = r.u32();
    const uint64_t count = r.u64();
    if (static_cast<int64_t>(count) != s.numel())
      r.fail("blob length " + std::to_string(count) + " does not match shape " + s.str() +
             " for '" + name + "'");
    Tensor t(s);
    r.f64_block(t.data(), count);
    ckpt.params.add(name, std::move(t));
  }
  if (ckpt.has_adam) {
    ckpt.adam_t = r.u64();
    ckpt.adam_beta1 = r.f64();
    ckpt.adam_beta2 = r.f64();
    ckpt.adam_eps = r.f64();
    for (uint32_t i = 0; i < n_params; ++i) {
      const Shape s = ckpt.params.tensor(i).shape();
      Tensor m(s), v(s);
      r.f64_block(m.data(), static_cast<size_t>(s.numel()));
      r.f64_block(v.data(), static_cast<size_t>(s.numel()));
      ckpt.adam_m.push_back(std::move(m));
      ckpt.adam_v.push_back(std::move(v));
    }
  }
  if (r.pos != bytes.size()) r.fail("trailing bytes");
  return ckpt;
}

}  // namespace mgrs
