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
#include <set>

#include "support.hpp"
#include "vigil/analysis.hpp"
#include "vigil/error.hpp"
#include "vigil/textio.hpp"

using namespace vigil;
namespace fs = std::filesystem;
using vigil::testing::TempDir;

namespace {

HeadParams random_head(Rng &rng, int dim, double scale) {
  HeadParams h = HeadParams::zeros(dim);
  for (double &w : h.weights) w = uniform(rng, -scale, scale);
  h.bias = {uniform(rng, -scale, scale), uniform(rng, -scale, scale)};
  return h;
}

double logit_of(const BackboneParams &b, const HeadParams &h, const Image &img, Label c) {
  return head_forward(h, embed(b, img)).logits[class_index(c)];
}

// 4x4 frames whose red channel decides the class under red_head().
struct ToyGallery {
  MemoryImageSource store;
  Manifest manifest;
  BackboneParams backbone = make_passthrough(4, 4);
};

Image flat_image(double red) {
  Image img(4, 4);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) {
      img.at(y, x, 0) = red;
      img.at(y, x, 1) = 0.3;
      img.at(y, x, 2) = 0.3;
    }
  return img;
}

// abandoned iff mean red > 0.5
HeadParams red_head() {
  HeadParams h = HeadParams::zeros(48);
  for (int p = 0; p < 16; ++p) h.weights[static_cast<std::size_t>(p * 3) * 2 + 1] = 1.0;
  h.bias = {0.0, -8.0};
  return h;
}

// `reds[i]` is frame i's red level; labels alternate background/abandoned.
ToyGallery toy_gallery(const std::vector<double> &reds) {
  ToyGallery g;
  for (std::size_t i = 0; i < reds.size(); ++i) {
    FrameRecord r;
    r.video_id = "T-e00" + std::to_string(i % 2);
    r.frame_index = static_cast<int>(i);
    r.label = i % 2 ? Label::abandoned : Label::background;
    r.image_ref = "mem://toy/" + std::to_string(i);
    g.store.add(r.image_ref, flat_image(reds[i]));
    g.manifest.records.push_back(r);
  }
  g.manifest.assignment = {{"T-e000", Split::test}, {"T-e001", Split::test}};
  return g;
}

std::size_t png_count(const fs::path &dir) {
  std::size_t n = 0;
  for (const auto &e : fs::recursive_directory_iterator(dir))
    if (e.path().extension() == ".png") ++n;
  return n;
}

}  // namespace

TEST(Saliency, PassthroughMatchesHeadColumn) {
  Rng rng(1);
  const BackboneParams b = make_passthrough(4, 4);
  for (int t = 0; t < 20; ++t) {
    const HeadParams h = random_head(rng, 48, 1.0);
    const Image img = vigil::testing::random_image(rng, 4, 4);
    const SaliencyMap m = saliency(b, h, img);
    const int c = class_index(m.target_class);
    EXPECT_EQ(m.target_class, predict(b, h, img).label);
    std::vector<double> raw(16);
    for (int p = 0; p < 16; ++p)
      for (int ch = 0; ch < 3; ++ch) raw[p] = std::max(raw[p], std::abs(h.w(p * 3 + ch, c)));
    const double lo = *std::min_element(raw.begin(), raw.end());
    const double hi = *std::max_element(raw.begin(), raw.end());
    for (int p = 0; p < 16; ++p) EXPECT_NEAR(m.values[p], (raw[p] - lo) / (hi - lo), 1e-12);
  }
}

TEST(Saliency, ZeroHeadGivesZeroMap) {
  Rng rng(2);
  const BackboneParams b = make_tiny_v1(2);
  const SaliencyMap m = saliency(b, HeadParams::zeros(64), vigil::testing::random_image(rng, 64, 64));
  EXPECT_EQ(m.target_class, Label::abandoned);
  for (double v : m.values) EXPECT_EQ(v, 0.0);
}

TEST(Saliency, InputGradientMatchesFiniteDifferences) {
  Rng rng(3);
  const BackboneParams b = make_tiny_v1(3);
  const HeadParams h = random_head(rng, 64, 0.5);
  Image img = vigil::testing::random_image(rng, 64, 64);
  const Label target = predict(b, h, img).label;
  const Tensor g = logit_input_gradient(b, h, img, target);
  const double step = 1e-4;
  int checked = 0;
  while (checked < 20) {
    const int y = static_cast<int>(uniform_int(rng, 0, 63));
    const int x = static_cast<int>(uniform_int(rng, 0, 63));
    const int c = static_cast<int>(uniform_int(rng, 0, 2));
    const double keep = img.at(y, x, c);
    img.at(y, x, c) = keep + step;
    const double up = logit_of(b, h, img, target);
    img.at(y, x, c) = keep - step;
    const double dn = logit_of(b, h, img, target);
    img.at(y, x, c) = keep;
    const double fd = (up - dn) / (2 * step);
    const double an = g.at(y, x, c);
    // Pixels whose gradient is tiny are dominated by ReLU/pool kinks.
    if (std::abs(an) < 1e-6 && std::abs(fd) < 1e-6) continue;
    EXPECT_LT(std::abs(an - fd), 1e-3 * std::max(std::abs(an), std::abs(fd))) << y << "," << x << "," << c;
    ++checked;
  }
}

TEST(Saliency, ShapeRangeAndExtremes) {
  Rng rng(4);
  const BackboneParams b = make_tiny_v1(4);
  for (int t = 0; t < 3; ++t) {
    const HeadParams h = random_head(rng, 64, 1.0);
    const Image img = vigil::testing::random_image(rng, 64, 64);
    const SaliencyMap m = saliency(b, h, img);
    EXPECT_EQ(m.height, 64);
    EXPECT_EQ(m.width, 64);
    ASSERT_EQ(m.values.size(), 64u * 64u);
    EXPECT_EQ(*std::min_element(m.values.begin(), m.values.end()), 0.0);
    EXPECT_EQ(*std::max_element(m.values.begin(), m.values.end()), 1.0);
    const Image vis = saliency_image(m);
    EXPECT_EQ(vis.at(5, 7, 0), m.at(5, 7));
    EXPECT_EQ(vis.at(5, 7, 2), m.at(5, 7));
  }
  EXPECT_THROW(saliency(b, HeadParams::zeros(32), vigil::testing::random_image(rng, 64, 64)), ShapeError);
}

TEST(Gallery, PerfectModelWritesNothing) {
  TempDir dir;
  auto toy = toy_gallery({0.1, 0.9, 0.2, 0.8, 0.0, 1.0});
  const auto g = build_error_gallery(toy.backbone, red_head(), toy.manifest, Split::test, toy.store,
                                     dir / "gallery");
  EXPECT_TRUE(g.false_positives.empty());
  EXPECT_TRUE(g.false_negatives.empty());
  EXPECT_TRUE(fs::is_directory(dir / "gallery" / "false_positive"));
  EXPECT_TRUE(fs::is_directory(dir / "gallery" / "false_negative"));
  EXPECT_EQ(png_count(dir / "gallery"), 0u);
}

TEST(Gallery, SingleFalseNegative) {
  TempDir dir;
  auto toy = toy_gallery({0.1, 0.9, 0.2, 0.3, 0.0, 1.0});
  const auto g = build_error_gallery(toy.backbone, red_head(), toy.manifest, Split::test, toy.store,
                                     dir / "gallery");
  EXPECT_TRUE(g.false_positives.empty());
  ASSERT_EQ(g.false_negatives.size(), 1u);
  EXPECT_EQ(g.false_negatives[0].record_index, 3u);
  EXPECT_EQ(png_count(dir / "gallery"), 2u);
  const std::string stem = gallery_stem(toy.manifest.records[3]);
  EXPECT_TRUE(fs::exists(dir / "gallery" / "false_negative" / (stem + ".png")));
  EXPECT_TRUE(fs::exists(dir / "gallery" / "false_negative" / (stem + "_saliency.png")));
  const std::string summary = read_text_file((dir / "gallery" / "summary.csv").string());
  EXPECT_EQ(std::count(summary.begin(), summary.end(), '\n'), 2);
}

TEST(Gallery, MembershipMatchesRecount) {
  TempDir dir;
  const auto corpus = vigil::testing::small_corpus({"B"}, 6, 10, 9, false);
  const BackboneParams b = make_tiny_v1(9);
  Rng rng(9);
  const HeadParams h = random_head(rng, 64, 3.0);
  const auto g = build_error_gallery(b, h, corpus.manifest, Split::test, corpus.store, dir.path());

  std::set<std::size_t> fp, fn;
  for (auto i : corpus.manifest.indices(Split::test)) {
    const auto &r = corpus.manifest.records[i];
    const Label p = predict(b, h, load_record_image(corpus.store, r)).label;
    if (p != r.label) (r.label == Label::background ? fp : fn).insert(i);
  }
  std::set<std::size_t> gfp, gfn;
  for (const auto &e : g.false_positives) {
    gfp.insert(e.record_index);
    EXPECT_EQ(e.record.label, Label::background);
    EXPECT_EQ(e.predicted, Label::abandoned);
  }
  for (const auto &e : g.false_negatives) {
    gfn.insert(e.record_index);
    EXPECT_EQ(e.record.label, Label::abandoned);
  }
  EXPECT_EQ(gfp, fp);
  EXPECT_EQ(gfn, fn);
  EXPECT_EQ(png_count(dir.path()), 2 * (fp.size() + fn.size()));
  for (std::size_t k = 1; k < g.false_positives.size(); ++k)
    EXPECT_GE(g.false_positives[k - 1].confidence, g.false_positives[k].confidence);
}

TEST(Occlusion, SlicesFalseNegatives) {
  auto toy = toy_gallery({0.1, 0.2, 0.2, 0.3, 0.0, 1.0});
  TempDir dir;
  const auto g = build_error_gallery(toy.backbone, red_head(), toy.manifest, Split::test, toy.store,
                                     dir.path());
  ASSERT_EQ(g.false_negatives.size(), 2u);
  EventIndex events;
  events["T-e000"] = {"T-e000", "T", false, 0, false};
  events["T-e001"] = {"T-e001", "T", true, 0, true};
  const auto s = occlusion_slice(g, toy.manifest, events);
  EXPECT_EQ(s.fn_near_furniture, 2u);
  EXPECT_EQ(s.fn_clear, 0u);
  EXPECT_EQ(s.positives_near_furniture, 3u);
  EXPECT_EQ(*s.near_furniture_share, 1.0);
  EXPECT_EQ(*s.clear_share, 0.0);
  EXPECT_DOUBLE_EQ(*s.near_furniture_fn_rate, 2.0 / 3.0);
  EXPECT_FALSE(s.clear_fn_rate.has_value());
  EXPECT_NE(occlusion_summary_text(s).find("clear_fn_rate=n/a"), std::string::npos);

  events.erase("T-e001");
  EXPECT_THROW(occlusion_slice(g, toy.manifest, events), MetadataMissingError);
}

TEST(Occlusion, NoFalseNegativesIsNotApplicable) {
  auto toy = toy_gallery({0.1, 0.9});
  TempDir dir;
  const auto g = build_error_gallery(toy.backbone, red_head(), toy.manifest, Split::test, toy.store,
                                     dir.path());
  EventIndex events;
  events["T-e001"] = {"T-e001", "T", true, 0, false};
  const auto s = occlusion_slice(g, toy.manifest, events);
  EXPECT_FALSE(s.near_furniture_share.has_value());
  EXPECT_FALSE(s.clear_share.has_value());
  EXPECT_EQ(*s.clear_fn_rate, 0.0);
}
