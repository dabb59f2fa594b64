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

#include "mgrs/data.hpp"

#include <algorithm>
#include <filesystem>

#include "mgrs/image_io.hpp"

namespace mgrs {

namespace fs = std::filesystem;

std::vector<std::string> list_triple_ids(const std::string& dir) {
  if (!fs::is_directory(dir)) throw IoError("not a directory: " + dir);
  const std::string suffix = "_degraded.ppm";
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      ids.push_back(name.substr(0, name.size() - suffix.size()));
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

ImageTriple read_triple(const std::string& dir, const std::string& id) {
  ImageTriple t;
  t.degraded = read_ppm(dir + "/" + id + "_degraded.ppm");
  t.clean = read_ppm(dir + "/" + id + "_clean.ppm");
  t.mask = read_ppm_mask(dir + "/" + id + "_mask.ppm");
  if (t.clean.h != t.degraded.h || t.clean.w != t.degraded.w || t.mask.h != t.degraded.h ||
      t.mask.w != t.degraded.w)
    throw IoError("triple " + id + ": component dimensions differ");
  return t;
}

void write_triple(const std::string& dir, const std::string& id, const ImageTriple& t) {
  fs::create_directories(dir);
  write_ppm(dir + "/" + id + "_degraded.ppm", t.degraded);
  write_ppm(dir + "/" + id + "_clean.ppm", t.clean);
  write_ppm_mask(dir + "/" + id + "_mask.ppm", t.mask);
}

Dataset load_dataset(const std::string& dir, int64_t min_size) {
  Dataset ds;
  ds.ids = list_triple_ids(dir);
  if (ds.ids.empty()) throw IoError("no image triples found in " + dir);
  for (const std::string& id : ds.ids) {
    ImageTriple t = read_triple(dir, id);
    if (min_size > 0 && (t.degraded.h < min_size || t.degraded.w < min_size))
      throw ContractError("dataset image " + id + " is smaller than patch size " +
                          std::to_string(min_size));
    ds.items.push_back(std::move(t));
  }
  return ds;
}

}  // namespace mgrs
