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
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vigil/image.hpp"
#include "vigil/kernels.hpp"
#include "vigil/labels.hpp"

namespace vigil {

enum class LayerKind : std::uint32_t {
  conv = 1,
  relu = 2,
  max_pool2 = 3,
  global_avg_pool = 4,
  flatten = 5,
  linear = 6,
};

struct Layer {
  LayerKind kind = LayerKind::relu;
  ConvShape conv;          // conv only
  int in_features = 0;     // linear only
  int out_features = 0;    // linear only
  std::vector<double> weights;  // conv: [out][ky][kx][in]; linear: [out][in]
  std::vector<double> bias;

  friend bool operator==(const Layer &a, const Layer &b) {
    return a.kind == b.kind && a.conv.in_ch == b.conv.in_ch && a.conv.out_ch == b.conv.out_ch &&
           a.conv.kernel == b.conv.kernel && a.conv.stride == b.conv.stride &&
           a.conv.pad == b.conv.pad && a.in_features == b.in_features &&
           a.out_features == b.out_features && a.weights == b.weights && a.bias == b.bias;
  }
};

/// Feature extractor. The architecture is fixed by `preset`; weights come
/// from a seeded initializer or a weights file.
struct BackboneParams {
  std::string preset;
  int input_height = 0;
  int input_width = 0;
  bool frozen = true;
  int embedding_dim = 0;
  std::vector<Layer> layers;

  friend bool operator==(const BackboneParams &, const BackboneParams &) = default;
};

inline constexpr const char *kTinyV1 = "tiny-v1";
inline constexpr const char *kPassthrough = "passthrough";

/// conv(3->8, 3x3) -> ReLU -> maxpool 2x2 -> conv(8->16, 3x3) -> ReLU ->
/// maxpool 2x2 -> global average pool -> linear(16 -> embedding_dim).
/// Convs use stride 1 and zero padding 1. The first conv is a fixed bank of
/// luminance, colour-opponent and edge filters and the second mostly carries
/// those maps forward; the seed jitters every weight. Random features from a
/// plain He init are too weak on 64x64 scenes to stand in for a pretrained
/// backbone. The final linear layer is Glorot-uniform with zero bias.
BackboneParams make_tiny_v1(std::uint64_t seed, int embedding_dim = 64, int input_height = 64,
                            int input_width = 64);

/// Identity 1x1 conv followed by flatten: the embedding is the image itself
/// (length h*w*3). Used to check saliency against a closed form.
BackboneParams make_passthrough(int input_height, int input_width);

BackboneParams make_backbone(const std::string &preset, std::uint64_t seed, int embedding_dim = 64);

/// CRC-32 over every backbone parameter. Used to prove a frozen backbone is
/// never modified.
std::uint32_t backbone_checksum(const BackboneParams &b);

std::size_t parameter_count(const BackboneParams &b);

/// Trainable 2-class linear head. weights is row-major embedding_dim x 2:
/// weights[d * 2 + c].
struct HeadParams {
  int embedding_dim = 0;
  std::vector<double> weights;
  std::array<double, 2> bias{0.0, 0.0};

  static HeadParams zeros(int embedding_dim);
  double w(int d, int c) const { return weights[static_cast<std::size_t>(d) * 2 + c]; }

  friend bool operator==(const HeadParams &, const HeadParams &) = default;
};

/// Class order [background, abandoned].
struct ForwardTrace {
  std::vector<double> embedding;
  std::array<double, 2> logits{};
  std::array<double, 2> probabilities{};
};

struct BackboneTrace {
  std::vector<Tensor> activations;  // activations[0] is the input
  std::vector<std::vector<std::uint32_t>> pool_argmax;  // per layer, empty unless max_pool2
};

Tensor image_to_tensor(const Image &img);

/// Throws ShapeError naming expected and actual sizes.
std::vector<double> embed(const BackboneParams &backbone, const Image &image);
BackboneTrace embed_traced(const BackboneParams &backbone, const Image &image);
/// Parallel over images; results identical to calling embed() one by one.
std::vector<std::vector<double>> embed_batch(const BackboneParams &backbone,
                                             const std::vector<Image> &images);

struct BackboneGrad {
  Tensor input;                  // d/d image, H x W x 3
  std::vector<Layer> params;     // same shapes as backbone.layers; empty when not requested
};

/// Backpropagates d(loss)/d(embedding) through a traced forward pass.
BackboneGrad backbone_backward(const BackboneParams &backbone, const BackboneTrace &trace,
                               std::span<const double> grad_embedding, bool want_params);

std::array<double, 2> softmax(const std::array<double, 2> &logits);

ForwardTrace head_forward(const HeadParams &head, std::span<const double> embedding);

/// -ln(max(p[true], 1e-12)).
double cross_entropy(const std::array<double, 2> &probabilities, Label truth);

struct HeadGrad {
  std::vector<double> weights;  // same layout as HeadParams::weights
  std::array<double, 2> bias{};
};

/// Gradient of cross_entropy(head_forward(...)) w.r.t. the head parameters.
HeadGrad head_gradient(const HeadParams &head, std::span<const double> embedding, Label truth);

struct Prediction {
  Label label = Label::abandoned;
  double confidence = 0.5;
  std::array<double, 2> probabilities{};
};

/// argmax with ties going to abandoned.
Prediction prediction_from_probabilities(const std::array<double, 2> &p);
Prediction predict(const BackboneParams &backbone, const HeadParams &head, const Image &image);

// --- weights file ------------------------------------------------------------
//
// "VGLW1", then a little-endian payload: preset name, input size, frozen flag,
// embedding_dim, per-layer dimension headers, every parameter as an IEEE-754
// binary64, head dimensions and parameters; then CRC-32 of the payload.

std::vector<std::uint8_t> encode_weights(const BackboneParams &backbone, const HeadParams &head);
/// Throws CorruptWeightsError on bad magic, checksum or truncation and
/// DimensionError when embedding_dim disagrees with `expected_embedding_dim`
/// or the head.
void decode_weights(std::span<const std::uint8_t> bytes, BackboneParams &backbone,
                    HeadParams &head, std::optional<int> expected_embedding_dim = std::nullopt);

void save_weights(const BackboneParams &backbone, const HeadParams &head, const std::string &path);
std::pair<BackboneParams, HeadParams> load_weights(const std::string &path,
                                                   std::optional<int> expected_embedding_dim = std::nullopt);

std::vector<std::uint8_t> read_binary_file(const std::string &path);
void write_binary_file(const std::string &path, std::span<const std::uint8_t> bytes);

}  // namespace vigil
