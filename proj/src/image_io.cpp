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

#include "mgrs/image_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace mgrs {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Cursor {
  const std::string& bytes;
  size_t pos = 0;
  const std::string& path;

  [[noreturn]] void fail(const std::string& what) const {
    throw IoError(path + ": " + what + " at byte offset " + std::to_string(pos));
  }

  void skip_space_and_comments() {
    while (pos < bytes.size()) {
      const char c = bytes[pos];
      if (c == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        ++pos;
      } else {
        break;
      }
    }
  }

  int64_t read_int() {
    skip_space_and_comments();
    if (pos >= bytes.size() || bytes[pos] < '0' || bytes[pos] > '9')
      fail("expected integer in header");
    int64_t v = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      v = v * 10 + (bytes[pos] - '0');
      if (v > (int64_t{1} << 30)) fail("header value out of range");
      ++pos;
    }
    return v;
  }
};

std::vector<unsigned char> read_p6_payload(const std::string& path, int64_t& w, int64_t& h) {
  const std::string bytes = read_file(path);
  Cursor cur{bytes, 0, path};
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') cur.fail("not a P6 file");
  cur.pos = 2;
  w = cur.read_int();
  h = cur.read_int();
  const int64_t maxval = cur.read_int();
  if (maxval != 255) cur.fail("maxval must be 255, got " + std::to_string(maxval));
  if (cur.pos >= bytes.size()) cur.fail("missing whitespace before payload");
  const char sep = bytes[cur.pos];
  if (sep != ' ' && sep != '\t' && sep != '\r' && sep != '\n')
    cur.fail("expected single whitespace before payload");
  ++cur.pos;
  if (w < 1 || h < 1) cur.fail("invalid dimensions");
  const size_t need = static_cast<size_t>(3 * w * h);
  if (bytes.size() - cur.pos < need) {
    cur.pos = bytes.size();
    cur.fail("truncated payload, need " + std::to_string(need) + " bytes");
  }
  return std::vector<unsigned char>(bytes.begin() + static_cast<long>(cur.pos),
                                    bytes.begin() + static_cast<long>(cur.pos + need));
}

unsigned char quantize(double v) {
  const double q = std::round(std::min(std::max(v, 0.0), 1.0) * 255.0);
  return static_cast<unsigned char>(q);
}

void write_p6(const std::string& path, int64_t w, int64_t h,
              const std::vector<unsigned char>& payload) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out << "P6\n" << w << " " << h << "\n255\n";
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace

Image read_ppm(const std::string& path) {
  int64_t w = 0, h = 0;
  const auto payload = read_p6_payload(path, w, h);
  Image img(h, w);
  for (int64_t y = 0; y < h; ++y)
    for (int64_t x = 0; x < w; ++x)
      for (int64_t c = 0; c < 3; ++c)
        img.at(c, y, x) = payload[static_cast<size_t>((y * w + x) * 3 + c)] / 255.0;
  return img;
}

void write_ppm(const std::string& path, const Image& img) {
  std::vector<unsigned char> payload(static_cast<size_t>(3 * img.h * img.w));
  for (int64_t y = 0; y < img.h; ++y)
    for (int64_t x = 0; x < img.w; ++x)
      for (int64_t c = 0; c < 3; ++c)
        payload[static_cast<size_t>((y * img.w + x) * 3 + c)] = quantize(img.at(c, y, x));
  write_p6(path, img.w, img.h, payload);
}

MaskImage read_ppm_mask(const std::string& path) {
  int64_t w = 0, h = 0;
  const auto payload = read_p6_payload(path, w, h);
  MaskImage mask(h, w);
  for (int64_t y = 0; y < h; ++y)
    for (int64_t x = 0; x < w; ++x) {
      const size_t base = static_cast<size_t>((y * w + x) * 3);
      mask.at(y, x) = (payload[base] + payload[base + 1] + payload[base + 2]) / (3.0 * 255.0);
    }
  return mask;
}

void write_ppm_mask(const std::string& path, const MaskImage& mask) {
  std::vector<unsigned char> payload(static_cast<size_t>(3 * mask.h * mask.w));
  for (int64_t y = 0; y < mask.h; ++y)
    for (int64_t x = 0; x < mask.w; ++x) {
      const unsigned char v = quantize(mask.at(y, x));
      const size_t base = static_cast<size_t>((y * mask.w + x) * 3);
      payload[base] = payload[base + 1] = payload[base + 2] = v;
    }
  write_p6(path, mask.w, mask.h, payload);
}

}  // namespace mgrs
