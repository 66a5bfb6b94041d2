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

#include "vigil/scenegen.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <limits>
#include <sstream>

#include "vigil/dataset.hpp"
#include "vigil/error.hpp"
#include "vigil/rng.hpp"
#include "vigil/textio.hpp"

namespace vigil {

namespace {

struct Rgb {
  double r, g, b;
};

// Independent sub-streams of a scene's seed.
enum : std::uint64_t { kStreamPalette = 1, kStreamFurniture = 2, kStreamTexture = 3 };

Rng scene_rng(const SceneSpec &spec, std::uint64_t stream) {
  return Rng(derive_seed(derive_seed(hash_string(spec.scene_id), spec.background_seed), stream));
}

int horizon_row(const SceneSpec &spec) {
  Rng rng = scene_rng(spec, kStreamPalette);
  return static_cast<int>(uniform_int(rng, spec.height / 4, spec.height / 3));
}

void fill_box(Image &img, const Box &b, const Rgb &c) {
  const int y0 = std::max(0, b.y), y1 = std::min(img.height, b.y + b.h);
  const int x0 = std::max(0, b.x), x1 = std::min(img.width, b.x + b.w);
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      img.at(y, x, 0) = c.r;
      img.at(y, x, 1) = c.g;
      img.at(y, x, 2) = c.b;
    }
}

void clamp_unit(Image &img) {
  for (double &v : img.pixels) v = std::clamp(v, 0.0, 1.0);
}

long long squared_gap(const Box &a, int x, int y) {
  const long long dx = a.x - x, dy = a.y - y;
  return dx * dx + dy * dy;
}

}  // namespace

void validate(const SceneSpec &spec) {
  if (spec.width < kMinSceneSize || spec.height < kMinSceneSize)
    throw InvalidSpecError("scene '" + spec.scene_id + "': dimensions " +
                           std::to_string(spec.width) + "x" + std::to_string(spec.height) +
                           " below minimum " + std::to_string(kMinSceneSize));
  if (spec.furniture_count < 0)
    throw InvalidSpecError("scene '" + spec.scene_id + "': negative furniture_count");
}

void validate(const EventSpec &event) {
  validate(event.scene);
  if (event.num_frames < 1)
    throw InvalidSpecError("event '" + event.event_id + "': num_frames must be >= 1");
  if (event.num_persons < 0)
    throw InvalidSpecError("event '" + event.event_id + "': negative num_persons");
  if (event.bag) {
    const auto &bag = *event.bag;
    if (bag.appear_frame < 0 || bag.appear_frame >= event.num_frames)
      throw InvalidSpecError("event '" + event.event_id + "': appear_frame " +
                             std::to_string(bag.appear_frame) + " outside [0, " +
                             std::to_string(event.num_frames) + ")");
    const Box requested{bag.x, bag.y, kBagWidth, kBagHeight};
    if (!requested.inside(event.scene.width, event.scene.height))
      throw InvalidSpecError("event '" + event.event_id + "': bag at (" + std::to_string(bag.x) +
                             ", " + std::to_string(bag.y) + ") is outside the image");
    if (bag.near_furniture && event.scene.furniture_count == 0)
      throw InvalidSpecError("event '" + event.event_id +
                             "': near_furniture bag in a scene without furniture");
  }
}

std::vector<Box> furniture_boxes(const SceneSpec &spec) {
  validate(spec);
  Rng rng = scene_rng(spec, kStreamFurniture);
  const int horizon = horizon_row(spec);
  std::vector<Box> boxes;
  boxes.reserve(spec.furniture_count);
  for (int i = 0; i < spec.furniture_count; ++i) {
    Box b;
    b.w = static_cast<int>(uniform_int(rng, 8, std::min(16, spec.width / 3)));
    b.h = static_cast<int>(uniform_int(rng, 6, std::min(14, spec.height / 3)));
    b.x = static_cast<int>(uniform_int(rng, 0, spec.width - b.w));
    // Props stand on the floor, below the wall line.
    b.y = static_cast<int>(uniform_int(rng, std::min(horizon, spec.height - b.h), spec.height - b.h));
    boxes.push_back(b);
  }
  return boxes;
}

Image render_background(const SceneSpec &spec) {
  validate(spec);
  Rng palette = scene_rng(spec, kStreamPalette);
  const int horizon = static_cast<int>(uniform_int(palette, spec.height / 4, spec.height / 3));
  const Rgb wall{uniform(palette, 0.15, 0.35), uniform(palette, 0.15, 0.35),
                 uniform(palette, 0.15, 0.35)};
  const Rgb floor{uniform(palette, 0.15, 0.35), uniform(palette, 0.15, 0.35),
                  uniform(palette, 0.15, 0.35)};

  Image img(spec.height, spec.width);
  Rng texture = scene_rng(spec, kStreamTexture);
  for (int y = 0; y < spec.height; ++y) {
    const bool is_wall = y < horizon;
    const Rgb &base = is_wall ? wall : floor;
    // Floor gets lighter toward the camera.
    const double shade = is_wall ? 1.0 : 0.9 + 0.2 * (y - horizon) / std::max(1, spec.height - horizon);
    for (int x = 0; x < spec.width; ++x) {
      const double n = uniform(texture, -0.03, 0.03);
      img.at(y, x, 0) = base.r * shade + n;
      img.at(y, x, 1) = base.g * shade + n;
      img.at(y, x, 2) = base.b * shade + n;
    }
  }

  for (const Box &b : furniture_boxes(spec)) {
    const Rgb c{uniform(palette, 0.15, 0.30), uniform(palette, 0.10, 0.22),
                uniform(palette, 0.05, 0.15)};
    fill_box(img, b, c);
  }
  clamp_unit(img);
  return img;
}

Box resolve_bag_box(const EventSpec &event) {
  validate(event);
  if (!event.bag) throw InvalidSpecError("event '" + event.event_id + "' has no bag");
  const auto &bag = *event.bag;
  const Box requested{bag.x, bag.y, kBagWidth, kBagHeight};
  if (!bag.near_furniture) return requested;

  // Snap next to a prop: try every side of every prop, keep the touching
  // placement closest to the requested position.
  const auto props = furniture_boxes(event.scene);
  std::optional<Box> best;
  long long best_d = std::numeric_limits<long long>::max();
  for (const Box &f : props) {
    const int ylo = f.y - kBagHeight + 1, yhi = f.y + f.h - 1;
    const int xlo = f.x - kBagWidth + 1, xhi = f.x + f.w - 1;
    const Box candidates[] = {
        {f.x - kBagWidth, std::clamp(bag.y, ylo, yhi), kBagWidth, kBagHeight},
        {f.x + f.w, std::clamp(bag.y, ylo, yhi), kBagWidth, kBagHeight},
        {std::clamp(bag.x, xlo, xhi), f.y - kBagHeight, kBagWidth, kBagHeight},
        {std::clamp(bag.x, xlo, xhi), f.y + f.h, kBagWidth, kBagHeight},
    };
    for (Box c : candidates) {
      // Pull back inside the frame while staying within the slack band.
      c.x = std::clamp(c.x, 0, event.scene.width - kBagWidth);
      c.y = std::clamp(c.y, 0, event.scene.height - kBagHeight);
      if (!c.intersects(f.dilated(kNearFurnitureSlack))) continue;
      const long long d = squared_gap(c, bag.x, bag.y);
      if (d < best_d) {
        best_d = d;
        best = c;
      }
    }
  }
  if (!best)
    throw InvalidSpecError("event '" + event.event_id + "': no furniture-adjacent bag placement");
  return *best;
}

std::vector<GeneratedFrame> generate_event(const EventSpec &event) {
  validate(event);
  const SceneSpec &scene = event.scene;
  const Image background = render_background(scene);
  const std::optional<Box> bag_box =
      event.bag ? std::optional<Box>(resolve_bag_box(event)) : std::nullopt;

  Rng motion(event.motion_seed);
  struct Person {
    Box box;
    Rgb color;
  };
  std::vector<Person> persons(static_cast<std::size_t>(event.num_persons));
  for (auto &p : persons) {
    p.box = {static_cast<int>(uniform_int(motion, 0, scene.width - kPersonWidth)),
             static_cast<int>(uniform_int(motion, 0, scene.height - kPersonHeight)),
             kPersonWidth, kPersonHeight};
    p.color = {uniform(motion, 0.05, 0.35), uniform(motion, 0.05, 0.35),
               uniform(motion, 0.05, 0.35)};
  }
  const Rgb bag_color{uniform(motion, 0.85, 0.95), uniform(motion, 0.55, 0.70),
                      uniform(motion, 0.05, 0.15)};
  Rng noise(derive_seed(event.motion_seed, 0x6e6f697365ULL));

  std::vector<GeneratedFrame> frames;
  frames.reserve(static_cast<std::size_t>(event.num_frames));
  for (int f = 0; f < event.num_frames; ++f) {
    GeneratedFrame out;
    out.image = background;
    out.video_id = event.event_id;
    out.frame_index = f;
    const bool bag_visible = bag_box && f >= event.bag->appear_frame;
    // Persons pass behind the bag so an abandoned frame always shows it.
    for (const auto &p : persons) fill_box(out.image, p.box, p.color);
    if (bag_visible) fill_box(out.image, *bag_box, bag_color);
    for (double &v : out.image.pixels) v += uniform(noise, -0.015, 0.015);
    clamp_unit(out.image);
    out.label = bag_visible ? Label::abandoned : Label::background;
    frames.push_back(std::move(out));

    for (auto &p : persons) {
      p.box.x = std::clamp(p.box.x + static_cast<int>(uniform_int(motion, -kMaxPersonStep, kMaxPersonStep)),
                           0, scene.width - kPersonWidth);
      p.box.y = std::clamp(p.box.y + static_cast<int>(uniform_int(motion, -kMaxPersonStep, kMaxPersonStep)),
                           0, scene.height - kPersonHeight);
    }
  }
  return frames;
}

SceneSpec default_scene(const std::string &scene_id, std::uint64_t seed) {
  SceneSpec s;
  s.scene_id = scene_id;
  s.background_seed = derive_seed(seed, hash_string(scene_id));
  return s;
}

std::string make_video_id(const std::string &scene_id, int event_index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "-e%03d", event_index);
  return scene_id + buf;
}

std::string scene_of_video(const std::string &video_id) {
  const auto pos = video_id.rfind("-e");
  if (pos == std::string::npos || pos == 0 || pos + 2 >= video_id.size()) return video_id;
  for (std::size_t i = pos + 2; i < video_id.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(video_id[i]))) return video_id;
  return video_id.substr(0, pos);
}

std::vector<EventSpec> corpus_events(const std::vector<SceneSpec> &scenes, int events_per_scene,
                                     std::uint64_t seed, int frames_per_event) {
  if (scenes.empty()) throw InvalidArgumentError("generate_corpus: empty scene list");
  if (events_per_scene < 2)
    throw InvalidArgumentError("generate_corpus: events_per_scene must be >= 2");
  if (frames_per_event < 1)
    throw InvalidArgumentError("generate_corpus: frames_per_event must be >= 1");

  std::vector<EventSpec> events;
  for (const SceneSpec &scene : scenes) {
    validate(scene);
    const auto props = furniture_boxes(scene);
    for (int i = 0; i < events_per_scene; ++i) {
      EventSpec ev;
      ev.event_id = make_video_id(scene.scene_id, i);
      ev.scene = scene;
      ev.num_frames = frames_per_event;
      ev.num_persons = 2;
      ev.motion_seed = derive_seed(seed, hash_string(ev.event_id));
      if (i % 2 == 0) {
        Rng rng(derive_seed(ev.motion_seed, 0x626167ULL));
        BagPlacement bag;
        bag.appear_frame = static_cast<int>(uniform_int(rng, 0, frames_per_event / 5));
        bag.near_furniture = !props.empty() && (i / 2) % 2 == 1;
        bag.x = static_cast<int>(uniform_int(rng, 0, scene.width - kBagWidth));
        bag.y = static_cast<int>(uniform_int(rng, 0, scene.height - kBagHeight));
        if (!bag.near_furniture) {
          // Clear bags keep away from every prop's slack band.
          for (int attempt = 0; attempt < 1000; ++attempt) {
            const Box b{bag.x, bag.y, kBagWidth, kBagHeight};
            const bool clear = std::none_of(props.begin(), props.end(), [&](const Box &f) {
              return b.intersects(f.dilated(kNearFurnitureSlack + 1));
            });
            if (clear) break;
            bag.x = static_cast<int>(uniform_int(rng, 0, scene.width - kBagWidth));
            bag.y = static_cast<int>(uniform_int(rng, 0, scene.height - kBagHeight));
          }
        }
        ev.bag = bag;
      }
      events.push_back(std::move(ev));
    }
  }
  return events;
}

std::vector<GeneratedFrame> generate_corpus(const std::vector<SceneSpec> &scenes,
                                            int events_per_scene, std::uint64_t seed,
                                            int frames_per_event) {
  std::vector<GeneratedFrame> out;
  for (const EventSpec &ev : corpus_events(scenes, events_per_scene, seed, frames_per_event)) {
    auto frames = generate_event(ev);
    std::move(frames.begin(), frames.end(), std::back_inserter(out));
  }
  return out;
}

// --- event metadata -------------------------------------------------------

EventIndex index_events(const std::vector<EventSpec> &events) {
  EventIndex index;
  for (const auto &ev : events) {
    EventInfo info;
    info.video_id = ev.event_id;
    info.scene_id = ev.scene.scene_id;
    info.has_bag = ev.bag.has_value();
    if (ev.bag) {
      info.appear_frame = ev.bag->appear_frame;
      info.near_furniture = ev.bag->near_furniture;
    }
    index[info.video_id] = info;
  }
  return index;
}

static constexpr const char *kEventsHeader = "vigil-events v1";

std::string serialize_events(const EventIndex &index) {
  std::ostringstream os;
  os << kEventsHeader << '\n';
  for (const auto &[id, e] : index)
    os << e.video_id << '\t' << e.scene_id << '\t' << (e.has_bag ? 1 : 0) << '\t'
       << e.appear_frame << '\t' << (e.near_furniture ? 1 : 0) << '\n';
  return os.str();
}

EventIndex parse_events(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(is, line) || line != kEventsHeader)
    throw ParseError("missing header '" + std::string(kEventsHeader) + "'", 1);
  ++lineno;
  EventIndex index;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line, '\t');
    if (f.size() != 5) throw ParseError("expected 5 fields", lineno);
    EventInfo e;
    e.video_id = std::string(f[0]);
    e.scene_id = std::string(f[1]);
    const auto has_bag = parse_int(f[2]), appear = parse_int(f[3]), near = parse_int(f[4]);
    if (!has_bag || !appear || !near) throw ParseError("malformed integer field", lineno);
    e.has_bag = *has_bag != 0;
    e.appear_frame = static_cast<int>(*appear);
    e.near_furniture = *near != 0;
    index[e.video_id] = e;
  }
  return index;
}

// --- ingest ---------------------------------------------------------------

bool parse_frame_filename(const std::string &filename, std::string &video_id, int &frame_index) {
  const auto dot = filename.rfind('.');
  if (dot == std::string::npos || dot + 1 == filename.size()) return false;
  const std::string stem = filename.substr(0, dot);
  const auto us = stem.rfind('_');
  if (us == std::string::npos || us == 0) return false;
  const std::string digits = stem.substr(us + 1);
  if (digits.size() != 6 ||
      !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
    return false;
  video_id = stem.substr(0, us);
  frame_index = std::stoi(digits);
  return true;
}

std::string frame_filename(const std::string &video_id, int frame_index, const std::string &ext) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%06d.", frame_index);
  return video_id + buf + ext;
}

IngestResult ingest_frames_dir(const std::filesystem::path &root,
                               const std::map<std::string, Label> &label_rule) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(root)) throw IoError("ingest root '" + root.string() + "' is not a directory");

  IngestResult result;
  for (const auto &[subdir, label] : label_rule) {
    const fs::path dir = root / subdir;
    if (!fs::is_directory(dir)) continue;
    std::vector<fs::path> files;
    for (const auto &entry : fs::directory_iterator(dir))
      if (entry.is_regular_file()) files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const auto &file : files) {
      FrameRecord r;
      if (!parse_frame_filename(file.filename().string(), r.video_id, r.frame_index)) {
        result.skipped.push_back({file.string(), "name does not match <video_id>_<NNNNNN>.<ext>"});
        continue;
      }
      try {
        (void)read_png(file.string());
      } catch (const IoError &e) {
        result.skipped.push_back({file.string(), e.what()});
        continue;
      }
      r.image_ref = file.string();
      r.label = label;
      r.variant = Variant::orig_color;
      result.records.push_back(std::move(r));
    }
  }

  std::sort(result.records.begin(), result.records.end(), [](const auto &a, const auto &b) {
    return std::tie(a.video_id, a.frame_index, a.image_ref) <
           std::tie(b.video_id, b.frame_index, b.image_ref);
  });
  // (video_id, frame_index) must be unique; later duplicates are skipped.
  std::vector<FrameRecord> unique;
  for (auto &r : result.records) {
    if (!unique.empty() && unique.back().video_id == r.video_id &&
        unique.back().frame_index == r.frame_index) {
      result.skipped.push_back({r.image_ref, "duplicate video_id/frame_index"});
      continue;
    }
    unique.push_back(std::move(r));
  }
  result.records = std::move(unique);

  if (result.records.empty())
    throw EmptyIngestError("no decodable frames under '" + root.string() + "' (" +
                           std::to_string(result.skipped.size()) + " skipped)");
  return result;
}

}  // namespace vigil
