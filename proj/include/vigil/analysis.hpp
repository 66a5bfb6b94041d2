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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vigil/dataset.hpp"
#include "vigil/model.hpp"
#include "vigil/scenegen.hpp"

namespace vigil {

/// Per-pixel saliency in [0,1], same height/width as the source image.
struct SaliencyMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;  // row-major
  Label target_class = Label::abandoned;
  std::optional<FrameRecord> source_frame;

  double at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }
};

/// Gradient of the predicted class logit with respect to the input, before
/// reduction. Shape matches the image.
Tensor logit_input_gradient(const BackboneParams &backbone, const HeadParams &head,
                            const Image &image, Label target);

/// Vanilla gradient saliency: |d logit_pred / d pixel|, max over channels,
/// min-max normalized. Maps with no spatial variation come out all zeros.
SaliencyMap saliency(const BackboneParams &backbone, const HeadParams &head, const Image &image);

/// Gray RGB rendering of a map.
Image saliency_image(const SaliencyMap &map);

struct GalleryEntry {
  FrameRecord record;
  std::size_t record_index = 0;
  double confidence = 0;
  Label predicted = Label::abandoned;
};

struct ErrorGallery {
  std::vector<GalleryEntry> false_positives;  // descending confidence
  std::vector<GalleryEntry> false_negatives;  // descending confidence
  std::filesystem::path output_dir;
  Split split = Split::test;
};

std::string gallery_stem(const FrameRecord &r);

/// Writes every misclassified frame of `split` and its saliency map under
/// output_dir/false_positive and output_dir/false_negative, plus
/// output_dir/summary.csv. Throws IoError if output_dir is unwritable.
ErrorGallery build_error_gallery(const BackboneParams &backbone, const HeadParams &head,
                                 const Manifest &manifest, Split split, const ImageSource &source,
                                 const std::filesystem::path &output_dir);

/// False negatives split by whether the generating event placed the bag
/// against furniture.
struct OcclusionSummary {
  std::size_t fn_near_furniture = 0;
  std::size_t fn_clear = 0;
  std::size_t positives_near_furniture = 0;  // abandoned frames of the split
  std::size_t positives_clear = 0;
  /// Share of all false negatives per partition; n/a without false negatives.
  std::optional<double> near_furniture_share;
  std::optional<double> clear_share;
  /// Miss rate within each partition; n/a without positives there.
  std::optional<double> near_furniture_fn_rate;
  std::optional<double> clear_fn_rate;
};

/// Throws MetadataMissingError for abandoned frames whose video is not in
/// `events` (real-data galleries cannot be sliced).
OcclusionSummary occlusion_slice(const ErrorGallery &gallery, const Manifest &manifest,
                                 const EventIndex &events);

std::string occlusion_summary_text(const OcclusionSummary &s);

}  // namespace vigil
