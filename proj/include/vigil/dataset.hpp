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

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "vigil/image.hpp"
#include "vigil/labels.hpp"

namespace vigil {

struct GeneratedFrame;

struct FrameRecord {
  std::string image_ref;  // file path, or "mem://..." key of a MemoryImageSource
  Label label = Label::background;
  std::string video_id;
  int frame_index = 0;
  Variant variant = Variant::orig_color;

  friend bool operator==(const FrameRecord &, const FrameRecord &) = default;
};

struct SplitSpec {
  std::array<double, 3> ratios = {0.70, 0.15, 0.15};  // train, val, test
  std::uint64_t seed = 0;
};

void validate(const SplitSpec &spec);

struct Manifest {
  std::vector<FrameRecord> records;
  std::map<std::string, Split> assignment;

  Split split_of(const FrameRecord &r) const;
  /// Indices into `records` for one split, in manifest order.
  std::vector<std::size_t> indices(Split s) const;
  std::vector<std::string> videos(Split s) const;

  friend bool operator==(const Manifest &, const Manifest &) = default;
};

/// Whole videos go to exactly one split. Targets are round(ratio * videos),
/// raised to at least one each; a deficit goes to train, an excess is taken
/// from val, then test, then train, never dropping a split below one video.
Manifest split_by_video(const std::vector<FrameRecord> &records, const SplitSpec &spec);

/// Per-split counts so label imbalance from whole-video splitting is visible.
struct SplitSummary {
  std::size_t videos = 0;
  std::size_t frames = 0;
  std::size_t abandoned = 0;
  double abandoned_fraction() const {
    return frames ? static_cast<double>(abandoned) / static_cast<double>(frames) : 0.0;
  }
};
std::array<SplitSummary, 3> summarize(const Manifest &m);

/// Four variants per orig-color input, in kAllVariants order.
std::vector<FrameRecord> augment(const std::vector<FrameRecord> &records);
/// Manifest overload keeps the assignment.
Manifest augment(const Manifest &m);

Manifest shuffle_within_split(const Manifest &m, std::uint64_t seed);

/// Resolves image_ref strings to original (orig-color) images. Implementations
/// must be safe to call concurrently.
class ImageSource {
 public:
  virtual ~ImageSource() = default;
  virtual Image load(const std::string &image_ref) const = 0;
};

/// PNG files; relative refs resolve against `base_dir`.
class DiskImageSource : public ImageSource {
 public:
  explicit DiskImageSource(std::filesystem::path base_dir = {}) : base_(std::move(base_dir)) {}
  Image load(const std::string &image_ref) const override;

 private:
  std::filesystem::path base_;
};

class MemoryImageSource : public ImageSource {
 public:
  void add(std::string ref, Image img) { images_[std::move(ref)] = std::make_shared<Image>(std::move(img)); }
  Image load(const std::string &image_ref) const override;
  std::size_t size() const { return images_.size(); }

 private:
  std::unordered_map<std::string, std::shared_ptr<const Image>> images_;
};

/// Loads a record's original image and applies its variant.
Image load_record_image(const ImageSource &src, const FrameRecord &r);

struct Batch {
  std::vector<Image> images;
  std::vector<Label> labels;
  std::vector<std::size_t> record_indices;  // into Manifest::records
};

/// Train drops the last partial batch; val and test keep it.
std::size_t num_batches(const Manifest &m, Split split, std::size_t batch_size);

/// Throws RangeError for a bad batch_index, IoError naming the record when
/// an image cannot be read.
Batch load_batch(const Manifest &m, Split split, std::size_t batch_index,
                 std::size_t batch_size, const ImageSource &src);

inline constexpr const char *kManifestHeader = "vigil-manifest v1";

std::string serialize_manifest(const Manifest &m);
/// Throws ParseError (with line number) on malformed input.
Manifest parse_manifest(const std::string &text);
void save_manifest(const Manifest &m, const std::string &path);
Manifest load_manifest(const std::string &path);

/// Records for generated frames. Each frame's image is registered in `store`
/// under "mem://<video_id>/<frame_index>" when `store` is given; otherwise
/// image_ref is "<ref_dir>/<video_id>_<frame>.png".
std::vector<FrameRecord> records_from_frames(const std::vector<GeneratedFrame> &frames,
                                             MemoryImageSource *store,
                                             const std::string &ref_dir = "frames");

}  // namespace vigil
