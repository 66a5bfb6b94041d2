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

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vigil/image.hpp"
#include "vigil/labels.hpp"

namespace vigil {

struct FrameRecord;

/// Axis-aligned pixel box, half-open: [x, x+w) x [y, y+h).
struct Box {
  int x = 0, y = 0, w = 0, h = 0;

  Box dilated(int px) const { return {x - px, y - px, w + 2 * px, h + 2 * px}; }
  bool intersects(const Box &o) const {
    return x < o.x + o.w && o.x < x + w && y < o.y + o.h && o.y < y + h;
  }
  bool inside(int width, int height) const {
    return x >= 0 && y >= 0 && x + w <= width && y + h <= height;
  }
  friend bool operator==(const Box &, const Box &) = default;
};

inline constexpr int kMinSceneSize = 32;
inline constexpr int kBagWidth = 6;
inline constexpr int kBagHeight = 5;
inline constexpr int kPersonWidth = 6;
inline constexpr int kPersonHeight = 13;
inline constexpr int kMaxPersonStep = 3;
/// A near-furniture bag always intersects the furniture box grown by this much.
inline constexpr int kNearFurnitureSlack = 2;

struct SceneSpec {
  std::string scene_id;
  int width = 64;
  int height = 64;
  std::uint64_t background_seed = 0;
  int furniture_count = 3;
};

struct BagPlacement {
  int appear_frame = 0;
  int x = 0;
  int y = 0;
  bool near_furniture = false;
};

struct EventSpec {
  std::string event_id;
  SceneSpec scene;
  int num_frames = 30;
  int num_persons = 2;
  std::optional<BagPlacement> bag;
  std::uint64_t motion_seed = 0;
};

struct GeneratedFrame {
  Image image;
  Label label = Label::background;
  std::string video_id;
  int frame_index = 0;
};

/// Throws InvalidSpecError when the spec violates its invariants.
void validate(const SceneSpec &spec);
void validate(const EventSpec &event);

/// Furniture prop boxes for a scene; a pure function of the spec.
std::vector<Box> furniture_boxes(const SceneSpec &spec);

Image render_background(const SceneSpec &spec);

/// Where the bag sprite actually lands. Near-furniture bags are snapped to
/// touch the furniture prop closest to the requested position.
Box resolve_bag_box(const EventSpec &event);

std::vector<GeneratedFrame> generate_event(const EventSpec &event);

/// The events generate_corpus would render, without rendering them. Even
/// event indices carry a bag, odd ones do not; bag events alternate between
/// near-furniture and clear placements.
std::vector<EventSpec> corpus_events(const std::vector<SceneSpec> &scenes,
                                     int events_per_scene, std::uint64_t seed,
                                     int frames_per_event = 30);

std::vector<GeneratedFrame> generate_corpus(const std::vector<SceneSpec> &scenes,
                                            int events_per_scene, std::uint64_t seed,
                                            int frames_per_event = 30);

/// Scene spec with seed-derived background for the given id. Scenes built from
/// the same (id, seed) are identical no matter which corpus they appear in.
SceneSpec default_scene(const std::string &scene_id, std::uint64_t seed);

/// "<scene>-e<NNN>"; scene_of_video() inverts it.
std::string make_video_id(const std::string &scene_id, int event_index);
std::string scene_of_video(const std::string &video_id);

// --- event metadata side table ------------------------------------------

struct EventInfo {
  std::string video_id;
  std::string scene_id;
  bool has_bag = false;
  int appear_frame = 0;
  bool near_furniture = false;
};

using EventIndex = std::map<std::string, EventInfo>;

EventIndex index_events(const std::vector<EventSpec> &events);
/// Header "vigil-events v1", then tab-separated video_id, scene_id, has_bag,
/// appear_frame, near_furniture.
std::string serialize_events(const EventIndex &index);
EventIndex parse_events(const std::string &text);

// --- ingest ---------------------------------------------------------------

struct IngestSkip {
  std::string path;
  std::string reason;
};

struct IngestResult {
  std::vector<FrameRecord> records;
  std::vector<IngestSkip> skipped;
};

/// Parses "<video_id>_<6-digit frame>.<ext>". Returns false on mismatch.
bool parse_frame_filename(const std::string &filename, std::string &video_id,
                          int &frame_index);
std::string frame_filename(const std::string &video_id, int frame_index,
                           const std::string &ext = "png");

/// Scans each subdirectory named in `label_rule`, decoding every file.
/// Undecodable or misnamed files are skipped and reported. Throws
/// EmptyIngestError when nothing decodes, IoError when `root` is missing.
IngestResult ingest_frames_dir(const std::filesystem::path &root,
                               const std::map<std::string, Label> &label_rule);

}  // namespace vigil
