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

#include "vigil/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vigil/error.hpp"
#include "vigil/eval.hpp"
#include "vigil/parallel.hpp"
#include "vigil/textio.hpp"

namespace vigil {

Tensor logit_input_gradient(const BackboneParams &backbone, const HeadParams &head,
                            const Image &image, Label target) {
  if (head.embedding_dim != backbone.embedding_dim)
    throw ShapeError("head embedding_dim " + std::to_string(head.embedding_dim) +
                     " != backbone embedding_dim " + std::to_string(backbone.embedding_dim));
  const BackboneTrace trace = embed_traced(backbone, image);
  // d logit_c / d embedding is column c of the head.
  std::vector<double> g(static_cast<std::size_t>(head.embedding_dim));
  for (int d = 0; d < head.embedding_dim; ++d) g[d] = head.w(d, class_index(target));
  return backbone_backward(backbone, trace, g, /*want_params=*/false).input;
}

SaliencyMap saliency(const BackboneParams &backbone, const HeadParams &head, const Image &image) {
  const Prediction pred = predict(backbone, head, image);
  const Tensor grad = logit_input_gradient(backbone, head, image, pred.label);

  SaliencyMap map;
  map.height = image.height;
  map.width = image.width;
  map.target_class = pred.label;
  map.values.resize(static_cast<std::size_t>(image.height) * image.width);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x) {
      double m = 0;
      for (int c = 0; c < 3; ++c) m = std::max(m, std::abs(grad.at(y, x, c)));
      map.values[static_cast<std::size_t>(y) * image.width + x] = m;
    }

  const auto [lo, hi] = std::minmax_element(map.values.begin(), map.values.end());
  const double min = *lo, max = *hi;
  if (max > min) {
    const double span = max - min;
    for (double &v : map.values) v = (v - min) / span;
    // Pin the extremes so they hit 0 and 1 exactly.
    *lo = 0.0;
    *hi = 1.0;
  } else {
    std::fill(map.values.begin(), map.values.end(), 0.0);
  }
  return map;
}

Image saliency_image(const SaliencyMap &map) {
  Image img(map.height, map.width);
  for (int y = 0; y < map.height; ++y)
    for (int x = 0; x < map.width; ++x)
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = map.at(y, x);
  return img;
}

std::string gallery_stem(const FrameRecord &r) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%06d_", r.frame_index);
  return r.video_id + buf + std::string(to_string(r.variant));
}

ErrorGallery build_error_gallery(const BackboneParams &backbone, const HeadParams &head,
                                 const Manifest &manifest, Split split, const ImageSource &source,
                                 const std::filesystem::path &output_dir) {
  namespace fs = std::filesystem;
  const auto preds = predict_split(backbone, head, manifest, split, source);

  ErrorGallery g;
  g.output_dir = output_dir;
  g.split = split;
  std::error_code ec;
  for (const char *sub : {"false_positive", "false_negative"}) {
    fs::create_directories(output_dir / sub, ec);
    if (ec || !fs::is_directory(output_dir / sub))
      throw IoError("cannot create gallery directory '" + (output_dir / sub).string() + "'");
  }

  for (const auto &p : preds) {
    if (p.prediction.label == p.truth) continue;
    GalleryEntry e{manifest.records[p.record], p.record, p.prediction.confidence, p.prediction.label};
    (p.truth == Label::background ? g.false_positives : g.false_negatives).push_back(std::move(e));
  }
  auto by_confidence = [](const GalleryEntry &a, const GalleryEntry &b) {
    if (a.confidence != b.confidence) return a.confidence > b.confidence;
    return a.record_index < b.record_index;
  };
  std::sort(g.false_positives.begin(), g.false_positives.end(), by_confidence);
  std::sort(g.false_negatives.begin(), g.false_negatives.end(), by_confidence);

  // Saliency maps in parallel; file writes stay on this thread.
  struct Job {
    const GalleryEntry *entry;
    const char *subdir;
    Image frame;
    Image map;
  };
  std::vector<Job> jobs;
  for (const auto &e : g.false_positives) jobs.push_back({&e, "false_positive", {}, {}});
  for (const auto &e : g.false_negatives) jobs.push_back({&e, "false_negative", {}, {}});
  parallel_for(jobs.size(), [&](std::size_t i) {
    jobs[i].frame = load_record_image(source, jobs[i].entry->record);
    jobs[i].map = saliency_image(saliency(backbone, head, jobs[i].frame));
  });

  std::ostringstream summary;
  summary << "path,confidence,true_label,predicted_label\n";
  for (const auto &job : jobs) {
    const std::string stem = gallery_stem(job.entry->record);
    const fs::path frame_path = output_dir / job.subdir / (stem + ".png");
    write_png(frame_path.string(), job.frame);
    write_png((output_dir / job.subdir / (stem + "_saliency.png")).string(), job.map);
    summary << (fs::path(job.subdir) / (stem + ".png")).string() << ','
            << format_double(job.entry->confidence) << ',' << to_string(job.entry->record.label)
            << ',' << to_string(job.entry->predicted) << '\n';
  }
  write_text_file((output_dir / "summary.csv").string(), summary.str());
  return g;
}

OcclusionSummary occlusion_slice(const ErrorGallery &gallery, const Manifest &manifest,
                                 const EventIndex &events) {
  auto event_of = [&](const FrameRecord &r) -> const EventInfo & {
    auto it = events.find(r.video_id);
    if (it == events.end())
      throw MetadataMissingError("no event metadata for video '" + r.video_id + "'");
    return it->second;
  };

  OcclusionSummary s;
  for (const auto &r : manifest.records) {
    if (r.label != Label::abandoned || manifest.split_of(r) != gallery.split) continue;
    (event_of(r).near_furniture ? s.positives_near_furniture : s.positives_clear)++;
  }
  for (const auto &e : gallery.false_negatives)
    (event_of(e.record).near_furniture ? s.fn_near_furniture : s.fn_clear)++;

  const std::size_t fn_total = s.fn_near_furniture + s.fn_clear;
  if (fn_total > 0) {
    s.near_furniture_share = static_cast<double>(s.fn_near_furniture) / static_cast<double>(fn_total);
    s.clear_share = static_cast<double>(s.fn_clear) / static_cast<double>(fn_total);
  }
  if (s.positives_near_furniture > 0)
    s.near_furniture_fn_rate =
        static_cast<double>(s.fn_near_furniture) / static_cast<double>(s.positives_near_furniture);
  if (s.positives_clear > 0)
    s.clear_fn_rate = static_cast<double>(s.fn_clear) / static_cast<double>(s.positives_clear);
  return s;
}

std::string occlusion_summary_text(const OcclusionSummary &s) {
  std::ostringstream os;
  os << "fn_near_furniture=" << s.fn_near_furniture << '\n'
     << "fn_clear=" << s.fn_clear << '\n'
     << "positives_near_furniture=" << s.positives_near_furniture << '\n'
     << "positives_clear=" << s.positives_clear << '\n'
     << "near_furniture_share=" << format_rate(s.near_furniture_share) << '\n'
     << "clear_share=" << format_rate(s.clear_share) << '\n'
     << "near_furniture_fn_rate=" << format_rate(s.near_furniture_fn_rate) << '\n'
     << "clear_fn_rate=" << format_rate(s.clear_fn_rate) << '\n';
  return os.str();
}

}  // namespace vigil
