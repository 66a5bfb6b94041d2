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
#include <string>
#include <vector>

#include "vigil/dataset.hpp"
#include "vigil/model.hpp"
#include "vigil/rng.hpp"

namespace vigil {

/// Defaults are the desk-scale settings; the learning rate, decay and batch
/// size match the published hyperparameters (trained there for 200k steps).
struct TrainConfig {
  std::int64_t total_steps = 2000;
  double initial_lr = 0.1;
  double lr_decay = 0.16;
  std::int64_t decay_interval_steps = 500;
  std::int64_t batch_size = 100;
  std::int64_t eval_interval_steps = 50;
  std::uint64_t seed = 0;
  bool freeze_backbone = true;
};

inline constexpr std::int64_t kPublishedTotalSteps = 200000;

void validate(const TrainConfig &config);

/// initial_lr * lr_decay^floor(step / decay_interval_steps).
double lr_at_step(const TrainConfig &config, std::int64_t step);

struct CurvePoint {
  std::int64_t step = 0;
  double train_loss = 0, train_accuracy = 0, val_loss = 0, val_accuracy = 0;

  friend bool operator==(const CurvePoint &, const CurvePoint &) = default;
};

struct TrainState {
  std::int64_t step = 0;
  HeadParams head;
  BackboneParams backbone;
  Rng rng;
};

TrainState init_state(const TrainConfig &config, BackboneParams backbone, HeadParams head);

struct StepResult {
  TrainState state;
  double batch_loss = 0;  // mean cross-entropy before the update
};

/// One gradient-descent step on a batch of images. With a frozen backbone
/// only the head moves; otherwise gradients flow into the backbone too.
/// Throws DivergenceError on a non-finite loss or gradient.
StepResult train_step(const TrainState &state, const Batch &batch, const TrainConfig &config);

/// Frozen-backbone step on precomputed embeddings. Gives exactly the same
/// result as train_step on the corresponding images.
StepResult train_step_embedded(const TrainState &state,
                               const std::vector<std::vector<double>> &embeddings,
                               const std::vector<Label> &labels, const TrainConfig &config);

struct TrainOutputs {
  std::string curves_path;      // written at the end, or on divergence with partial curves
  std::string checkpoint_path;  // empty: no checkpoints
  std::int64_t checkpoint_every = 0;  // 0: only at the end
};

struct TrainResult {
  TrainState state;
  std::vector<CurvePoint> curves;
};

/// Cycles over the seed-shuffled train split (drop-last batches) until
/// config.total_steps, starting from state.step. Every eval_interval_steps a
/// CurvePoint is recorded from the step's batch and the full val split.
TrainResult run_training(const TrainConfig &config, const Manifest &manifest,
                         const ImageSource &source, TrainState state,
                         const TrainOutputs &outputs = {});

TrainResult run_training(const TrainConfig &config, const Manifest &manifest,
                         const ImageSource &source, const BackboneParams &backbone_init,
                         const HeadParams &head_init, const TrainOutputs &outputs = {});

inline constexpr const char *kCurvesHeader = "step,train_loss,train_acc,val_loss,val_acc";
std::string serialize_curves(const std::vector<CurvePoint> &curves);
std::vector<CurvePoint> parse_curves(const std::string &text);

// Checkpoint: "VGLC1", step, batch size, freeze flag, seed, generator state
// and an embedded weights blob, then CRC-32.
std::vector<std::uint8_t> encode_checkpoint(const TrainState &state, const TrainConfig &config);
void save_checkpoint(const TrainState &state, const TrainConfig &config, const std::string &path);
/// Throws IncompatibleCheckpointError when the checkpoint was written under a
/// different batch size, freeze mode, seed or a manifest too small for it.
TrainState resume(const std::string &path, const TrainConfig &config, const Manifest &manifest);
TrainState decode_checkpoint(std::span<const std::uint8_t> bytes, const TrainConfig &config,
                             const Manifest &manifest);

}  // namespace vigil
