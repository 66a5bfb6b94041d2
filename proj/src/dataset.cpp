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

#include "vigil/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "vigil/error.hpp"
#include "vigil/parallel.hpp"
#include "vigil/rng.hpp"
#include "vigil/scenegen.hpp"
#include "vigil/textio.hpp"

namespace vigil {

void validate(const SplitSpec &spec) {
  double sum = 0;
  for (double r : spec.ratios) {
    if (!(r > 0.0)) throw InvalidArgumentError("split ratios must all be > 0");
    sum += r;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw InvalidArgumentError("split ratios must sum to 1 (got " + format_double(sum) + ")");
}

Split Manifest::split_of(const FrameRecord &r) const {
  auto it = assignment.find(r.video_id);
  if (it == assignment.end())
    throw InvalidArgumentError("video '" + r.video_id + "' has no split assignment");
  return it->second;
}

std::vector<std::size_t> Manifest::indices(Split s) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (split_of(records[i]) == s) out.push_back(i);
  return out;
}

std::vector<std::string> Manifest::videos(Split s) const {
  std::vector<std::string> out;
  for (const auto &[v, sp] : assignment)
    if (sp == s) out.push_back(v);
  return out;
}

Manifest split_by_video(const std::vector<FrameRecord> &records, const SplitSpec &spec) {
  validate(spec);
  std::set<std::string> unique;
  for (const auto &r : records) unique.insert(r.video_id);
  if (unique.size() < 3)
    throw InsufficientVideosError("need at least 3 distinct videos to split, got " +
                                  std::to_string(unique.size()));

  std::vector<std::string> videos(unique.begin(), unique.end());
  Rng rng(spec.seed);
  seeded_shuffle(videos.begin(), videos.end(), rng);

  const auto n = static_cast<long long>(videos.size());
  std::array<long long, 3> count{};
  for (int i = 0; i < 3; ++i)
    count[i] = std::max(1LL, static_cast<long long>(std::llround(spec.ratios[i] * static_cast<double>(n))));
  long long diff = n - (count[0] + count[1] + count[2]);
  if (diff > 0) count[0] += diff;
  for (int idx : {1, 2, 0}) {
    while (diff < 0 && count[idx] > 1) {
      --count[idx];
      ++diff;
    }
  }

  Manifest m;
  m.records = records;
  long long pos = 0;
  for (int s = 0; s < 3; ++s)
    for (long long k = 0; k < count[s]; ++k) m.assignment[videos[pos++]] = kAllSplits[s];
  return m;
}

std::array<SplitSummary, 3> summarize(const Manifest &m) {
  std::array<SplitSummary, 3> out{};
  for (const auto &[v, s] : m.assignment) ++out[static_cast<int>(s)].videos;
  for (const auto &r : m.records) {
    auto &sum = out[static_cast<int>(m.split_of(r))];
    ++sum.frames;
    if (r.label == Label::abandoned) ++sum.abandoned;
  }
  return out;
}

std::vector<FrameRecord> augment(const std::vector<FrameRecord> &records) {
  std::vector<FrameRecord> out;
  out.reserve(records.size() * 4);
  for (const auto &r : records) {
    if (r.variant != Variant::orig_color)
      throw DoubleAugmentationError("record " + r.video_id + "/" + std::to_string(r.frame_index) +
                                    " is already a " + std::string(to_string(r.variant)) +
                                    " variant");
    for (Variant v : kAllVariants) {
      FrameRecord copy = r;
      copy.variant = v;
      out.push_back(std::move(copy));
    }
  }
  return out;
}

Manifest augment(const Manifest &m) {
  Manifest out;
  out.records = augment(m.records);
  out.assignment = m.assignment;
  return out;
}

Manifest shuffle_within_split(const Manifest &m, std::uint64_t seed) {
  Manifest out = m;
  Rng rng(seed);
  for (Split s : kAllSplits) {
    const auto idx = m.indices(s);
    std::vector<std::size_t> perm = idx;
    seeded_shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t k = 0; k < idx.size(); ++k) out.records[idx[k]] = m.records[perm[k]];
  }
  return out;
}

Image DiskImageSource::load(const std::string &image_ref) const {
  std::filesystem::path p(image_ref);
  if (p.is_relative() && !base_.empty()) p = base_ / p;
  return read_png(p.string());
}

Image MemoryImageSource::load(const std::string &image_ref) const {
  auto it = images_.find(image_ref);
  if (it == images_.end()) throw IoError("no in-memory image '" + image_ref + "'");
  return *it->second;
}

Image load_record_image(const ImageSource &src, const FrameRecord &r) {
  try {
    return apply_variant(src.load(r.image_ref), r.variant);
  } catch (const IoError &e) {
    throw IoError("record " + r.video_id + "/" + std::to_string(r.frame_index) + "/" +
                  std::string(to_string(r.variant)) + ": " + e.what());
  }
}

std::size_t num_batches(const Manifest &m, Split split, std::size_t batch_size) {
  if (batch_size == 0) throw InvalidArgumentError("batch_size must be >= 1");
  const std::size_t n = m.indices(split).size();
  return split == Split::train ? n / batch_size : (n + batch_size - 1) / batch_size;
}

Batch load_batch(const Manifest &m, Split split, std::size_t batch_index, std::size_t batch_size,
                 const ImageSource &src) {
  const std::size_t nb = num_batches(m, split, batch_size);
  if (batch_index >= nb)
    throw RangeError("batch " + std::to_string(batch_index) + " out of range for split " +
                     std::string(to_string(split)) + " (" + std::to_string(nb) + " batches)");
  const auto idx = m.indices(split);
  const std::size_t begin = batch_index * batch_size;
  const std::size_t end = std::min(idx.size(), begin + batch_size);

  Batch b;
  b.record_indices.assign(idx.begin() + static_cast<std::ptrdiff_t>(begin),
                          idx.begin() + static_cast<std::ptrdiff_t>(end));
  b.images.resize(b.record_indices.size());
  b.labels.resize(b.record_indices.size());
  parallel_for(b.record_indices.size(), [&](std::size_t k) {
    const FrameRecord &r = m.records[b.record_indices[k]];
    b.images[k] = load_record_image(src, r);
    b.labels[k] = r.label;
  });
  return b;
}

// --- manifest file ----------------------------------------------------------

std::string serialize_manifest(const Manifest &m) {
  std::ostringstream os;
  os << kManifestHeader << '\n';
  for (const auto &r : m.records) {
    if (r.image_ref.find('\t') != std::string::npos || r.image_ref.find('\n') != std::string::npos)
      throw InvalidArgumentError("image_ref contains a tab or newline: '" + r.image_ref + "'");
    os << r.image_ref << '\t' << to_string(r.label) << '\t' << r.video_id << '\t' << r.frame_index
       << '\t' << to_string(r.variant) << '\t' << to_string(m.split_of(r)) << '\n';
  }
  return os.str();
}

Manifest parse_manifest(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kManifestHeader)
    throw ParseError("missing header '" + std::string(kManifestHeader) + "'", 1);

  Manifest m;
  std::set<std::tuple<std::string, int, Variant>> seen;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line, '\t');
    if (f.size() != 6)
      throw ParseError("expected 6 tab-separated fields, got " + std::to_string(f.size()), lineno);
    FrameRecord r;
    r.image_ref = std::string(f[0]);
    r.video_id = std::string(f[2]);
    if (r.image_ref.empty() || r.video_id.empty()) throw ParseError("empty image_ref or video_id", lineno);
    const auto frame = parse_int(f[3]);
    if (!frame || *frame < 0) throw ParseError("bad frame_index '" + std::string(f[3]) + "'", lineno);
    r.frame_index = static_cast<int>(*frame);
    Split split;
    try {
      r.label = parse_label(f[1]);
      r.variant = parse_variant(f[4]);
    } catch (const InvalidArgumentError &e) {
      throw ParseError(e.what(), lineno);
    }
    try {
      split = parse_split(f[5]);
    } catch (const InvalidArgumentError &) {
      throw ParseError("video '" + r.video_id + "' has no valid split assignment ('" +
                           std::string(f[5]) + "')",
                       lineno);
    }
    auto [it, inserted] = m.assignment.emplace(r.video_id, split);
    if (!inserted && it->second != split)
      throw ParseError("video '" + r.video_id + "' assigned to both " +
                           std::string(to_string(it->second)) + " and " +
                           std::string(to_string(split)),
                       lineno);
    if (!seen.emplace(r.video_id, r.frame_index, r.variant).second)
      throw ParseError("duplicate record " + r.video_id + "/" + std::to_string(r.frame_index) + "/" +
                           std::string(to_string(r.variant)),
                       lineno);
    m.records.push_back(std::move(r));
  }
  return m;
}

void save_manifest(const Manifest &m, const std::string &path) {
  write_text_file(path, serialize_manifest(m));
}

Manifest load_manifest(const std::string &path) { return parse_manifest(read_text_file(path)); }

std::vector<FrameRecord> records_from_frames(const std::vector<GeneratedFrame> &frames,
                                             MemoryImageSource *store, const std::string &ref_dir) {
  std::vector<FrameRecord> out;
  out.reserve(frames.size());
  for (const auto &f : frames) {
    FrameRecord r;
    r.label = f.label;
    r.video_id = f.video_id;
    r.frame_index = f.frame_index;
    r.variant = Variant::orig_color;
    if (store) {
      r.image_ref = "mem://" + f.video_id + "/" + std::to_string(f.frame_index);
      store->add(r.image_ref, f.image);
    } else {
      r.image_ref = ref_dir + "/" + frame_filename(f.video_id, f.frame_index);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vigil
