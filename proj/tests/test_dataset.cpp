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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "support.hpp"
#include "vigil/error.hpp"
#include "vigil/textio.hpp"

using namespace vigil;
using vigil::testing::TempDir;

namespace {

std::vector<FrameRecord> records_for(int videos, int frames_per_video, const std::string &prefix = "v") {
  std::vector<FrameRecord> out;
  for (int v = 0; v < videos; ++v)
    for (int f = 0; f < frames_per_video; ++f) {
      FrameRecord r;
      r.video_id = prefix + std::to_string(v);
      r.frame_index = f;
      r.image_ref = "mem://" + r.video_id + "/" + std::to_string(f);
      r.label = (v % 2) ? Label::abandoned : Label::background;
      out.push_back(r);
    }
  return out;
}

std::array<std::size_t, 3> video_counts(const Manifest &m) {
  std::array<std::size_t, 3> c{};
  for (const auto &[v, s] : m.assignment) ++c[static_cast<int>(s)];
  return c;
}

// Independent statement of the rounding rule used by split_by_video.
std::array<long, 3> expected_counts(int n, const std::array<double, 3> &r) {
  std::array<long, 3> t{};
  for (int i = 0; i < 3; ++i) t[i] = std::max(1L, std::lround(r[i] * n));
  long sum = t[0] + t[1] + t[2];
  if (sum < n) t[0] += n - sum;
  for (int i : {1, 2, 0})
    while (sum > n && t[i] > 1) {
      --t[i];
      --sum;
    }
  return t;
}

}  // namespace

TEST(SplitByVideo, TenVideosGiveSevenOneTwo) {
  const Manifest m = split_by_video(records_for(10, 3), SplitSpec{{0.7, 0.15, 0.15}, 1});
  const auto c = video_counts(m);
  EXPECT_EQ(c[0], 7u);
  EXPECT_EQ(c[1], 1u);
  EXPECT_EQ(c[2], 2u);
}

TEST(SplitByVideo, ThreeVideosOneEach) {
  for (auto r : {std::array{0.7, 0.15, 0.15}, std::array{0.98, 0.01, 0.01}, std::array{0.1, 0.1, 0.8}}) {
    const auto c = video_counts(split_by_video(records_for(3, 2), SplitSpec{r, 5}));
    EXPECT_EQ(c, (std::array<std::size_t, 3>{1, 1, 1}));
  }
}

TEST(SplitByVideo, TooFewVideos) {
  EXPECT_THROW(split_by_video(records_for(2, 5), SplitSpec{}), InsufficientVideosError);
}

TEST(SplitByVideo, InvalidSpec) {
  EXPECT_THROW(split_by_video(records_for(5, 1), SplitSpec{{0.5, 0.5, 0.0}, 1}), InvalidArgumentError);
  EXPECT_THROW(split_by_video(records_for(5, 1), SplitSpec{{0.5, 0.3, 0.3}, 1}), InvalidArgumentError);
}

TEST(SplitByVideo, SharedVideoSharesSplit) {
  const Manifest m = split_by_video(records_for(6, 4), SplitSpec{{0.5, 0.25, 0.25}, 3});
  for (const auto &r : m.records) EXPECT_EQ(m.split_of(r), m.assignment.at(r.video_id));
}

TEST(SplitByVideo, PropertyCountsAndPartition) {
  Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = static_cast<int>(uniform_int(rng, 3, 60));
    std::array<double, 3> r{uniform(rng, 0.01, 1), uniform(rng, 0.01, 1), uniform(rng, 0.01, 1)};
    const double s = r[0] + r[1] + r[2];
    for (double &x : r) x /= s;
    r[0] = 1.0 - r[1] - r[2];
    const Manifest m = split_by_video(records_for(n, 2), SplitSpec{r, rng()});
    const auto c = video_counts(m);
    const auto e = expected_counts(n, r);
    for (int i = 0; i < 3; ++i) EXPECT_EQ(static_cast<long>(c[i]), e[i]) << "n=" << n;
    EXPECT_EQ(m.assignment.size(), static_cast<std::size_t>(n));
  }
}

TEST(SplitByVideo, DeterministicAndSeedSensitive) {
  const auto recs = records_for(20, 1);
  EXPECT_EQ(split_by_video(recs, SplitSpec{{0.7, 0.15, 0.15}, 4}),
            split_by_video(recs, SplitSpec{{0.7, 0.15, 0.15}, 4}));
  EXPECT_NE(split_by_video(recs, SplitSpec{{0.7, 0.15, 0.15}, 4}).assignment,
            split_by_video(recs, SplitSpec{{0.7, 0.15, 0.15}, 5}).assignment);
}

TEST(SplitByVideo, SummaryExposesLabelShare) {
  const Manifest m = split_by_video(records_for(10, 4), SplitSpec{{0.7, 0.15, 0.15}, 1});
  const auto s = summarize(m);
  std::size_t frames = 0;
  for (Split sp : kAllSplits) {
    const auto &x = s[static_cast<int>(sp)];
    frames += x.frames;
    std::size_t ab = 0;
    for (auto i : m.indices(sp)) ab += m.records[i].label == Label::abandoned;
    EXPECT_EQ(x.abandoned, ab);
    EXPECT_EQ(x.videos, m.videos(sp).size());
  }
  EXPECT_EQ(frames, 40u);
}

TEST(Augment, FourTimesCount) {
  const auto out = augment(records_for(25, 4));
  EXPECT_EQ(out.size(), 400u);
  for (std::size_t i = 0; i < out.size(); ++i) EXPECT_EQ(out[i].variant, kAllVariants[i % 4]);
}

TEST(Augment, PreservesIdentityAndLabel) {
  const auto in = records_for(4, 3);
  const auto out = augment(in);
  for (std::size_t i = 0; i < in.size(); ++i)
    for (std::size_t k = 0; k < 4; ++k) {
      const auto &o = out[i * 4 + k];
      EXPECT_EQ(o.label, in[i].label);
      EXPECT_EQ(o.video_id, in[i].video_id);
      EXPECT_EQ(o.frame_index, in[i].frame_index);
      EXPECT_EQ(o.image_ref, in[i].image_ref);
    }
}

TEST(Augment, RejectsAugmentedInput) {
  auto recs = records_for(3, 1);
  recs[1].variant = Variant::flip_gray;
  EXPECT_THROW(augment(recs), DoubleAugmentationError);
  EXPECT_THROW(augment(augment(records_for(3, 1))), DoubleAugmentationError);
}

TEST(Augment, ManifestOverloadKeepsAssignment) {
  const Manifest m = split_by_video(records_for(5, 2), SplitSpec{{0.6, 0.2, 0.2}, 2});
  const Manifest a = augment(m);
  EXPECT_EQ(a.assignment, m.assignment);
  EXPECT_EQ(a.records.size(), 4 * m.records.size());
}

TEST(ImageTransforms, FlipIsBitExactInvolution) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Image img = vigil::testing::random_image(rng, 1 + t % 9, 1 + (t * 5) % 11);
    EXPECT_EQ(flip_horizontal(flip_horizontal(img)), img);
  }
}

TEST(ImageTransforms, FlipMirrorsColumns) {
  Image img(2, 3);
  img.at(1, 0, 2) = 0.25;
  const Image f = flip_horizontal(img);
  EXPECT_EQ(f.at(1, 2, 2), 0.25);
  EXPECT_EQ(f.at(1, 0, 2), 0.0);
}

TEST(ImageTransforms, GrayChannelsEqualAndIdempotent) {
  Rng rng(4);
  for (int t = 0; t < 50; ++t) {
    const Image img = vigil::testing::random_image(rng, 7, 5);
    const Image g = to_gray(img);
    for (int y = 0; y < g.height; ++y)
      for (int x = 0; x < g.width; ++x) {
        EXPECT_EQ(g.at(y, x, 0), g.at(y, x, 1));
        EXPECT_EQ(g.at(y, x, 1), g.at(y, x, 2));
        const double luma = 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
        EXPECT_NEAR(g.at(y, x, 0), luma, 1e-15);
      }
    EXPECT_EQ(to_gray(g), g);
  }
}

TEST(Shuffle, PermutationWithinSplits) {
  const Manifest m = split_by_video(records_for(12, 5), SplitSpec{{0.5, 0.25, 0.25}, 9});
  const Manifest s = shuffle_within_split(m, 77);
  EXPECT_EQ(s.assignment, m.assignment);
  EXPECT_EQ(s, shuffle_within_split(m, 77));
  EXPECT_NE(s.records, m.records);
  for (Split sp : kAllSplits) {
    std::multiset<std::string> a, b;
    for (auto i : m.indices(sp)) a.insert(m.records[i].image_ref);
    for (auto i : s.indices(sp)) b.insert(s.records[i].image_ref);
    EXPECT_EQ(a, b);
  }
}

namespace {

struct BatchFixture {
  MemoryImageSource store;
  Manifest m;
  explicit BatchFixture(std::size_t per_split) {
    // One video per split, `per_split` frames each.
    for (const auto &[vid, sp] : {std::pair{"t", Split::train}, {"v", Split::val}, {"s", Split::test}}) {
      m.assignment[vid] = sp;
      for (std::size_t f = 0; f < per_split; ++f) {
        FrameRecord r;
        r.video_id = vid;
        r.frame_index = static_cast<int>(f);
        r.image_ref = std::string("mem://") + vid + "/" + std::to_string(f);
        r.label = f % 3 ? Label::background : Label::abandoned;
        store.add(r.image_ref, Image(4, 4, static_cast<double>(f) / 1000.0));
        m.records.push_back(r);
      }
    }
  }
};

}  // namespace

TEST(LoadBatch, TrainDropsLastPartial) {
  BatchFixture fx(250);
  EXPECT_EQ(num_batches(fx.m, Split::train, 100), 2u);
  for (std::size_t b = 0; b < 2; ++b) {
    const Batch batch = load_batch(fx.m, Split::train, b, 100, fx.store);
    EXPECT_EQ(batch.images.size(), 100u);
    EXPECT_EQ(batch.labels.size(), 100u);
  }
  EXPECT_THROW(load_batch(fx.m, Split::train, 2, 100, fx.store), RangeError);
}

TEST(LoadBatch, TestKeepsLastPartial) {
  BatchFixture fx(250);
  ASSERT_EQ(num_batches(fx.m, Split::test, 100), 3u);
  EXPECT_EQ(load_batch(fx.m, Split::test, 0, 100, fx.store).images.size(), 100u);
  EXPECT_EQ(load_batch(fx.m, Split::test, 1, 100, fx.store).images.size(), 100u);
  EXPECT_EQ(load_batch(fx.m, Split::test, 2, 100, fx.store).images.size(), 50u);
  EXPECT_THROW(load_batch(fx.m, Split::test, 3, 100, fx.store), RangeError);
  EXPECT_THROW(load_batch(fx.m, Split::test, 0, 0, fx.store), InvalidArgumentError);
}

TEST(LoadBatch, BitIdenticalAcrossCalls) {
  BatchFixture fx(130);
  const Batch a = load_batch(fx.m, Split::val, 1, 64, fx.store);
  const Batch b = load_batch(fx.m, Split::val, 1, 64, fx.store);
  EXPECT_EQ(a.images, b.images);
  EXPECT_EQ(a.labels, b.labels);
  EXPECT_EQ(a.record_indices, b.record_indices);
  for (std::size_t i = 0; i < a.images.size(); ++i)
    EXPECT_EQ(a.labels[i], fx.m.records[a.record_indices[i]].label);
}

TEST(LoadBatch, AppliesVariantOnLoad) {
  MemoryImageSource store;
  Image img(2, 2);
  img.at(0, 0, 0) = 1.0;
  store.add("mem://a/0", img);
  FrameRecord r{"mem://a/0", Label::background, "a", 0, Variant::flip_gray};
  const Image got = load_record_image(store, r);
  EXPECT_EQ(got, to_gray(flip_horizontal(img)));
}

TEST(LoadBatch, UnreadableImageNamesRecord) {
  BatchFixture fx(5);
  fx.m.records[fx.m.indices(Split::test)[2]].image_ref = "mem://nowhere/9";
  try {
    load_batch(fx.m, Split::test, 0, 10, fx.store);
    FAIL() << "expected IoError";
  } catch (const IoError &e) {
    EXPECT_NE(std::string(e.what()).find("mem://nowhere/9"), std::string::npos);
  }
}

TEST(ManifestFile, RoundTrip) {
  TempDir dir;
  Manifest m = split_by_video(records_for(5, 2), SplitSpec{{0.6, 0.2, 0.2}, 1});
  m = augment(m);
  const auto path = (dir / "m.tsv").string();
  save_manifest(m, path);
  EXPECT_EQ(load_manifest(path), m);
}

TEST(ManifestFile, Errors) {
  EXPECT_THROW(parse_manifest(""), ParseError);
  EXPECT_THROW(parse_manifest("vigil-manifest v2\n"), ParseError);
  const std::string header = std::string(kManifestHeader) + "\n";
  try {
    parse_manifest(header + "a.png\tabandoned\tv1\t0\torig-color\ttrain\n" +
                   "b.png\tabandoned\tv1\t1\torig-color\n");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 3u);
  }
  // Same video in two splits.
  EXPECT_THROW(parse_manifest(header + "a.png\tabandoned\tv1\t0\torig-color\ttrain\n" +
                              "b.png\tabandoned\tv1\t1\torig-color\ttest\n"),
               ParseError);
  // Unassigned split name.
  EXPECT_THROW(parse_manifest(header + "a.png\tabandoned\tv1\t0\torig-color\tnone\n"), ParseError);
  // Duplicate (video, frame, variant).
  EXPECT_THROW(parse_manifest(header + "a.png\tabandoned\tv1\t0\torig-color\ttrain\n" +
                              "a.png\tabandoned\tv1\t0\torig-color\ttrain\n"),
               ParseError);
  EXPECT_THROW(load_manifest("/nonexistent/m.tsv"), IoError);
}
