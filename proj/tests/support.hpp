/**
 * Copyright 2026 The Vigil Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <atomic>
#include <filesystem>
#include <string>
#include <unistd.h>

#include "vigil/dataset.hpp"
#include "vigil/rng.hpp"
#include "vigil/scenegen.hpp"

namespace vigil::testing {

// Removed on destruction. Unique per process and instance.
class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("vigil_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir &) = delete;
  TempDir &operator=(const TempDir &) = delete;
  const std::filesystem::path &path() const { return path_; }
  std::filesystem::path operator/(const std::string &s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

// Images live in `store`; the manifest is split by video.
struct Corpus {
  MemoryImageSource store;
  Manifest manifest;
  std::vector<EventSpec> events;
};

inline Corpus small_corpus(std::vector<std::string> scene_ids, int events, int frames,
                           std::uint64_t seed, bool augmented) {
  Corpus c;
  std::vector<SceneSpec> scenes;
  for (const auto &id : scene_ids) scenes.push_back(default_scene(id, seed));
  c.events = corpus_events(scenes, events, seed, frames);
  std::vector<GeneratedFrame> all;
  for (const auto &ev : c.events) {
    auto f = generate_event(ev);
    std::move(f.begin(), f.end(), std::back_inserter(all));
  }
  c.manifest = split_by_video(records_from_frames(all, &c.store), SplitSpec{{0.7, 0.15, 0.15}, seed});
  if (augmented) c.manifest = augment(c.manifest);
  return c;
}

inline Image random_image(Rng &rng, int h, int w) {
  Image img(h, w);
  for (double &v : img.pixels) v = uniform01(rng);
  return img;
}

}  // namespace vigil::testing
