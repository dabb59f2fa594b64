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

#include "mgrs/synth.hpp"

namespace mgrs {

/// Co-registered degraded image, clean image and binary GT mask.
struct ImageTriple {
  Image degraded;
  Image clean;
  MaskImage mask;
};

struct Dataset {
  std::vector<std::string> ids;
  std::vector<ImageTriple> items;

  size_t size() const { return items.size(); }
};

/// Triples live as <id>_degraded.ppm / <id>_clean.ppm / <id>_mask.ppm.
std::vector<std::string> list_triple_ids(const std::string& dir);
ImageTriple read_triple(const std::string& dir, const std::string& id);
void write_triple(const std::string& dir, const std::string& id, const ImageTriple& t);

/// Loads every triple in the directory, sorted by id. min_size > 0 rejects
/// images smaller than the training patch.
Dataset load_dataset(const std::string& dir, int64_t min_size = 0);

}  // namespace mgrs
