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

#include <cmath>

#include "support.hpp"
#include "vigil/error.hpp"
#include "vigil/textio.hpp"
#include "vigil/train.hpp"

using namespace vigil;
using vigil::testing::TempDir;

namespace {

const vigil::testing::Corpus &shared_corpus() {
  static const auto c = vigil::testing::small_corpus({"A"}, 8, 20, 3, true);
  return c;
}

TrainConfig quick_config(std::int64_t steps, std::int64_t batch = 50) {
  TrainConfig c;
  c.total_steps = steps;
  c.batch_size = batch;
  c.eval_interval_steps = 10;
  c.seed = 3;
  return c;
}

// train_step_embedded never looks at the backbone.
TrainState head_only_state(int dim) {
  TrainState s;
  s.head = HeadParams::zeros(dim);
  return s;
}

}  // namespace

TEST(Schedule, PublishedValues) {
  TrainConfig c;
  EXPECT_EQ(lr_at_step(c, 0), 0.1);
  EXPECT_EQ(lr_at_step(c, c.decay_interval_steps - 1), 0.1);
  EXPECT_EQ(lr_at_step(c, c.decay_interval_steps), 0.016);
  EXPECT_EQ(lr_at_step(c, 2 * c.decay_interval_steps), 0.00256);
  c.decay_interval_steps = 7;
  EXPECT_EQ(lr_at_step(c, 7), 0.016);
  EXPECT_EQ(lr_at_step(c, 14), 0.00256);
}

TEST(Schedule, NonIncreasingAndPositive) {
  Rng rng(1);
  for (int t = 0; t < 200; ++t) {
    TrainConfig c;
    c.initial_lr = uniform(rng, 1e-4, 1);
    c.lr_decay = uniform(rng, 0.01, 1);
    c.decay_interval_steps = uniform_int(rng, 1, 50);
    double prev = lr_at_step(c, 0);
    for (std::int64_t s = 1; s < 400; ++s) {
      const double lr = lr_at_step(c, s);
      EXPECT_LE(lr, prev);
      EXPECT_GT(lr, 0.0);
      prev = lr;
    }
  }
}

TEST(Config, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(validate(c));
  c.initial_lr = 0;
  EXPECT_THROW(validate(c), InvalidArgumentError);
  c = {};
  c.lr_decay = 1.5;
  EXPECT_THROW(validate(c), InvalidArgumentError);
  c = {};
  c.total_steps = 0;
  EXPECT_THROW(validate(c), InvalidArgumentError);
  c = {};
  c.decay_interval_steps = 0;
  EXPECT_THROW(validate(c), InvalidArgumentError);
  EXPECT_EQ(TrainConfig{}.batch_size, 100);
  EXPECT_EQ(kPublishedTotalSteps, 200000);
}

// Zero head, e = [1], truth abandoned, lr 0.1: gradient (0.5, -0.5) for both
// the weight row and the bias, so logits become (-0.1, 0.1) and the loss is
// ln(1 + e^-0.2).
TEST(TrainStep, OneDimensionalDescentByHand) {
  TrainConfig c;
  const TrainState st = head_only_state(1);
  const auto r = train_step_embedded(st, {{1.0}}, {Label::abandoned}, c);
  EXPECT_NEAR(r.batch_loss, std::log(2.0), 1e-15);
  EXPECT_NEAR(r.state.head.w(0, 0), -0.05, 1e-15);
  EXPECT_NEAR(r.state.head.w(0, 1), 0.05, 1e-15);
  EXPECT_NEAR(r.state.head.bias[1], 0.05, 1e-15);
  const auto after = train_step_embedded(r.state, {{1.0}}, {Label::abandoned}, c);
  EXPECT_NEAR(after.batch_loss, std::log1p(std::exp(-0.2)), 1e-12);
  EXPECT_LT(after.batch_loss, r.batch_loss);
  EXPECT_EQ(after.state.step, 2);
}

TEST(TrainStep, VanishingLearningRateBarelyMoves) {
  TrainConfig c;
  c.decay_interval_steps = 1;
  Rng rng(2);
  TrainState st = head_only_state(3);
  for (double &w : st.head.weights) w = uniform(rng, -1, 1);
  st.step = 100;  // lr = 0.1 * 0.16^100
  const auto r = train_step_embedded(st, {{1, 2, 3}, {-1, 0, 4}}, {Label::abandoned, Label::background}, c);
  for (std::size_t i = 0; i < st.head.weights.size(); ++i)
    EXPECT_LT(std::abs(r.state.head.weights[i] - st.head.weights[i]), 1e-12);
}

TEST(TrainStep, FrozenBackboneUntouchedAndMatchesEmbeddedPath) {
  const auto &c = shared_corpus();
  TrainConfig cfg = quick_config(1, 8);
  const Batch batch = load_batch(c.manifest, Split::train, 0, 8, c.store);
  const TrainState st = init_state(cfg, make_tiny_v1(3), HeadParams::zeros(64));
  const auto before = backbone_checksum(st.backbone);
  const auto r = train_step(st, batch, cfg);
  EXPECT_EQ(backbone_checksum(r.state.backbone), before);
  const auto e = train_step_embedded(st, embed_batch(st.backbone, batch.images), batch.labels, cfg);
  EXPECT_EQ(r.state.head, e.state.head);
  EXPECT_EQ(r.batch_loss, e.batch_loss);
}

TEST(TrainStep, EndToEndMovesBackbone) {
  const auto &c = shared_corpus();
  TrainConfig cfg = quick_config(1, 4);
  cfg.freeze_backbone = false;
  const Batch batch = load_batch(c.manifest, Split::train, 0, 4, c.store);
  Rng rng(4);
  HeadParams head = HeadParams::zeros(64);
  for (double &w : head.weights) w = uniform(rng, -0.5, 0.5);
  const TrainState st = init_state(cfg, make_tiny_v1(3), head);
  const auto r = train_step(st, batch, cfg);
  EXPECT_NE(backbone_checksum(r.state.backbone), backbone_checksum(st.backbone));
}

TEST(TrainStep, DivergenceCarriesStep) {
  TrainConfig c;
  c.initial_lr = 1e300;
  TrainState st = head_only_state(1);
  st.step = 7;
  try {
    train_step_embedded(st, {{1e200}}, {Label::abandoned}, c);
    FAIL();
  } catch (const DivergenceError &e) {
    EXPECT_EQ(e.step(), 7);
  }
}

TEST(RunTraining, CurveCountAndMonotoneSteps) {
  const auto &c = shared_corpus();
  TrainConfig cfg;
  cfg.batch_size = 50;
  cfg.seed = 3;
  const auto res = run_training(cfg, c.manifest, c.store, make_tiny_v1(3), HeadParams::zeros(64));
  ASSERT_EQ(res.curves.size(), 40u);
  for (std::size_t i = 0; i < res.curves.size(); ++i) {
    EXPECT_EQ(res.curves[i].step, static_cast<std::int64_t>((i + 1) * 50));
    EXPECT_GE(res.curves[i].train_loss, 0.0);
    EXPECT_GE(res.curves[i].val_accuracy, 0.0);
    EXPECT_LE(res.curves[i].val_accuracy, 1.0);
  }
  EXPECT_EQ(res.state.step, 2000);
}

TEST(RunTraining, DeterministicAndFrozen) {
  const auto &c = shared_corpus();
  const TrainConfig cfg = quick_config(120);
  const auto bb = make_tiny_v1(3);
  const auto a = run_training(cfg, c.manifest, c.store, bb, HeadParams::zeros(64));
  const auto b = run_training(cfg, c.manifest, c.store, bb, HeadParams::zeros(64));
  EXPECT_EQ(a.curves, b.curves);
  EXPECT_EQ(a.state.head, b.state.head);
  EXPECT_EQ(backbone_checksum(a.state.backbone), backbone_checksum(bb));
}

TEST(RunTraining, RequiresTrainAndValFrames) {
  const auto &c = shared_corpus();
  Manifest m = c.manifest;
  std::erase_if(m.records, [&](const FrameRecord &r) { return m.split_of(r) == Split::val; });
  EXPECT_THROW(run_training(quick_config(10), m, c.store, make_tiny_v1(3), HeadParams::zeros(64)),
               EmptySplitError);
  EXPECT_THROW(run_training(quick_config(10, 100000), c.manifest, c.store, make_tiny_v1(3),
                            HeadParams::zeros(64)),
               InvalidArgumentError);
}

TEST(RunTraining, DivergenceSavesPartialCurves) {
  const auto &c = shared_corpus();
  TempDir dir;
  TrainConfig cfg = quick_config(400);
  cfg.eval_interval_steps = 1;
  cfg.initial_lr = 1e308;
  cfg.lr_decay = 1.0;
  const auto path = (dir / "curves.csv").string();
  try {
    run_training(cfg, c.manifest, c.store, make_tiny_v1(3), HeadParams::zeros(64), {path, "", 0});
    FAIL() << "expected divergence";
  } catch (const DivergenceError &e) {
    const auto curves = parse_curves(read_text_file(path));
    EXPECT_EQ(static_cast<std::int64_t>(curves.size()), e.step());
    EXPECT_LT(e.step(), 400);
  }
}

TEST(Checkpoint, ResumeMatchesStraightRun) {
  const auto &c = shared_corpus();
  TempDir dir;
  const auto ckpt = (dir / "c.bin").string();
  const auto bb = make_tiny_v1(3);
  const auto straight = run_training(quick_config(200), c.manifest, c.store, bb, HeadParams::zeros(64));
  run_training(quick_config(100), c.manifest, c.store, bb, HeadParams::zeros(64), {"", ckpt, 0});
  const TrainState mid = resume(ckpt, quick_config(200), c.manifest);
  EXPECT_EQ(mid.step, 100);
  const auto rest = run_training(quick_config(200), c.manifest, c.store, mid);
  EXPECT_EQ(rest.state.head, straight.state.head);
  EXPECT_EQ(rest.state.step, 200);
  ASSERT_EQ(rest.curves.size(), 10u);
  EXPECT_EQ(rest.curves.back(), straight.curves.back());
}

TEST(Checkpoint, IncompatibleConfigs) {
  const auto &c = shared_corpus();
  TempDir dir;
  const auto ckpt = (dir / "c.bin").string();
  const TrainConfig cfg = quick_config(20);
  save_checkpoint(init_state(cfg, make_tiny_v1(3), HeadParams::zeros(64)), cfg, ckpt);
  TrainConfig other = cfg;
  other.batch_size = 25;
  EXPECT_THROW(resume(ckpt, other, c.manifest), IncompatibleCheckpointError);
  other = cfg;
  other.seed = 4;
  EXPECT_THROW(resume(ckpt, other, c.manifest), IncompatibleCheckpointError);
  other = cfg;
  other.freeze_backbone = false;
  EXPECT_THROW(resume(ckpt, other, c.manifest), IncompatibleCheckpointError);
  auto bytes = read_binary_file(ckpt);
  bytes[bytes.size() / 2] ^= 1;
  EXPECT_THROW(decode_checkpoint(bytes, cfg, c.manifest), CorruptWeightsError);
}

TEST(Checkpoint, StepZeroIsNoOp) {
  const auto &c = shared_corpus();
  TempDir dir;
  const auto ckpt = (dir / "c.bin").string();
  const TrainConfig cfg = quick_config(20);
  const TrainState s0 = init_state(cfg, make_tiny_v1(3), HeadParams::zeros(64));
  save_checkpoint(s0, cfg, ckpt);
  const TrainState back = resume(ckpt, cfg, c.manifest);
  EXPECT_EQ(back.step, 0);
  EXPECT_EQ(back.head, s0.head);
  EXPECT_EQ(back.backbone, s0.backbone);
  EXPECT_EQ(back.rng, s0.rng);
}

// Property: distinct one-hot embeddings (dim >= n) with arbitrary labels are
// linearly separable; plain gradient descent reaches 100% train accuracy.
TEST(Overfit, OneHotToySetsAreMemorised) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = static_cast<int>(uniform_int(rng, 2, 24));
    const int dim = n + static_cast<int>(uniform_int(rng, 0, 8));
    std::vector<std::vector<double>> emb(static_cast<std::size_t>(n), std::vector<double>(dim, 0.0));
    std::vector<Label> labels;
    for (int i = 0; i < n; ++i) {
      emb[i][i] = 1.0;
      labels.push_back(uniform01(rng) < 0.5 ? Label::background : Label::abandoned);
    }
    TrainConfig c;
    c.lr_decay = 1.0;
    c.initial_lr = 0.5;
    TrainState st = head_only_state(dim);
    for (int s = 0; s < 300; ++s) st = train_step_embedded(st, emb, labels, c).state;
    for (int i = 0; i < n; ++i)
      EXPECT_EQ(prediction_from_probabilities(head_forward(st.head, emb[i]).probabilities).label, labels[i]);
  }
}

TEST(Curves, RoundTrip) {
  const std::vector<CurvePoint> pts{{50, 0.5, 0.75, 0.6, 0.7}, {100, 0.1 + 0.2, 1.0, 1e-17, 0.0}};
  const std::string text = serialize_curves(pts);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCurvesHeader);
  EXPECT_EQ(parse_curves(text), pts);
  EXPECT_THROW(parse_curves("step,loss\n"), ParseError);
}
