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

#include "mgrs/synth.hpp"

namespace mgrs {

// PPM P6, 8-bit, maxval 255. Reads accept standard whitespace and '#'
// comments in the header; writes emit the canonical "P6\n<w> <h>\n255\n"
// form, so write(read(f)) is byte-identical for canonical files. Values map
// v/255 on read and round(v*255), clamped, on write. Malformed input raises
// IoError naming the byte offset.

Image read_ppm(const std::string& path);
void write_ppm(const std::string& path, const Image& img);

// Masks ride in P6 as gray (all three channels equal; read takes the mean).
MaskImage read_ppm_mask(const std::string& path);
void write_ppm_mask(const std::string& path, const MaskImage& mask);

}  // namespace mgrs
