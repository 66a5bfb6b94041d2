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

#include "vigil/model.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "vigil/binio.hpp"
#include "vigil/error.hpp"
#include "vigil/parallel.hpp"
#include "vigil/rng.hpp"

namespace vigil {

std::uint32_t crc32_of(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = static_cast<uInt>(std::min<std::size_t>(bytes.size() - off, 1u << 30));
    crc = ::crc32(crc, bytes.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(crc);
}

// --- presets -------------------------------------------------------------------

namespace {

Layer linear_layer(int in, int out, Rng &rng) {
  Layer l;
  l.kind = LayerKind::linear;
  l.in_features = in;
  l.out_features = out;
  const double limit = std::sqrt(6.0 / (in + out));  // Glorot-uniform
  l.weights.resize(static_cast<std::size_t>(in) * out);
  for (double &w : l.weights) w = uniform(rng, -limit, limit);
  l.bias.assign(static_cast<std::size_t>(out), 0.0);
  return l;
}

Layer plain(LayerKind k) {
  Layer l;
  l.kind = k;
  return l;
}

// Generic first-layer filters of the kind pretrained networks converge to:
// blob detectors on luminance and colour-opponent axes plus oriented edges.
// The seed jitters every weight so distinct seeds give distinct backbones.
constexpr double kLuma[3] = {0.299, 0.587, 0.114};
constexpr double kConv1Gain = 20.0;

Layer filter_bank_conv1(Rng &rng) {
  Layer l;
  l.kind = LayerKind::conv;
  l.conv = ConvShape{3, 8, 3, 1, 1};
  l.weights.assign(l.conv.weight_count(), 0.0);
  l.bias.assign(8, 0.0);
  auto set_all = [&](int o, const double (&color)[3], double scale) {
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx)
        for (int c = 0; c < 3; ++c) l.weights[l.conv.widx(o, ky, kx, c)] = scale * color[c] / 9.0;
  };
  const double warm[3] = {0.5, 0.5, -1.0};
  const double cool[3] = {-0.5, -0.5, 1.0};
  const double neg_luma[3] = {-kLuma[0], -kLuma[1], -kLuma[2]};
  set_all(0, kLuma, kConv1Gain);  // bright blobs
  l.bias[0] = -0.45 * kConv1Gain;
  set_all(1, warm, kConv1Gain);  // warm (red/yellow) blobs
  l.bias[1] = -0.45 * kConv1Gain;
  set_all(2, neg_luma, kConv1Gain);  // dark blobs
  l.bias[2] = 0.2 * kConv1Gain;
  set_all(3, cool, kConv1Gain);  // blue blobs
  l.bias[3] = -0.1 * kConv1Gain;
  // Sobel-style edges on luminance: horizontal, vertical, two diagonals.
  const double edges[4][3][3] = {
      {{-1, 0, 1}, {-2, 0, 2}, {-1, 0, 1}},
      {{-1, -2, -1}, {0, 0, 0}, {1, 2, 1}},
      {{0, 1, 2}, {-1, 0, 1}, {-2, -1, 0}},
      {{-2, -1, 0}, {-1, 0, 1}, {0, 1, 2}},
  };
  for (int e = 0; e < 4; ++e)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx)
        for (int c = 0; c < 3; ++c)
          l.weights[l.conv.widx(4 + e, ky, kx, c)] = edges[e][ky][kx] * kLuma[c];
  for (double &w : l.weights) w *= 1.0 + uniform(rng, -0.1, 0.1);
  return l;
}

// Channels 0-7 carry the first-layer maps forward through their centre tap
// with small random cross-talk; channels 8-15 are random mixtures.
Layer filter_bank_conv2(Rng &rng) {
  Layer l;
  l.kind = LayerKind::conv;
  l.conv = ConvShape{8, 16, 3, 1, 1};
  l.weights.resize(l.conv.weight_count());
  for (double &w : l.weights) w = uniform(rng, -0.02, 0.02);
  const double gains[8] = {60.0, 30.0, 0.5, 1.0, 0.5, 0.5, 0.5, 0.5};
  for (int k = 0; k < 8; ++k) l.weights[l.conv.widx(k, 1, 1, k)] = gains[k] * (1.0 + uniform(rng, -0.1, 0.1));
  const double limit = 0.5 * std::sqrt(6.0 / (8 * 9));
  for (int o = 8; o < 16; ++o)
    for (int ky = 0; ky < 3; ++ky)
      for (int kx = 0; kx < 3; ++kx)
        for (int i = 0; i < 8; ++i) l.weights[l.conv.widx(o, ky, kx, i)] = uniform(rng, -limit, limit);
  l.bias.assign(16, 0.0);
  return l;
}

}  // namespace

BackboneParams make_tiny_v1(std::uint64_t seed, int embedding_dim, int input_height,
                            int input_width) {
  if (embedding_dim < 1) throw InvalidArgumentError("embedding_dim must be >= 1");
  if (input_height < 4 || input_width < 4)
    throw InvalidArgumentError("tiny-v1 needs at least 4x4 input");
  Rng rng(derive_seed(seed, hash_string(kTinyV1)));
  BackboneParams b;
  b.preset = kTinyV1;
  b.input_height = input_height;
  b.input_width = input_width;
  b.embedding_dim = embedding_dim;
  b.layers.push_back(filter_bank_conv1(rng));
  b.layers.push_back(plain(LayerKind::relu));
  b.layers.push_back(plain(LayerKind::max_pool2));
  b.layers.push_back(filter_bank_conv2(rng));
  b.layers.push_back(plain(LayerKind::relu));
  b.layers.push_back(plain(LayerKind::max_pool2));
  b.layers.push_back(plain(LayerKind::global_avg_pool));
  b.layers.push_back(linear_layer(16, embedding_dim, rng));
  return b;
}

BackboneParams make_passthrough(int input_height, int input_width) {
  BackboneParams b;
  b.preset = kPassthrough;
  b.input_height = input_height;
  b.input_width = input_width;
  b.embedding_dim = input_height * input_width * 3;
  Layer id;
  id.kind = LayerKind::conv;
  id.conv = ConvShape{3, 3, 1, 1, 0};
  id.weights.assign(id.conv.weight_count(), 0.0);
  for (int c = 0; c < 3; ++c) id.weights[id.conv.widx(c, 0, 0, c)] = 1.0;
  id.bias.assign(3, 0.0);
  b.layers.push_back(std::move(id));
  b.layers.push_back(plain(LayerKind::flatten));
  return b;
}

BackboneParams make_backbone(const std::string &preset, std::uint64_t seed, int embedding_dim) {
  if (preset == kTinyV1) return make_tiny_v1(seed, embedding_dim);
  if (preset == kPassthrough) return make_passthrough(64, 64);
  throw InvalidArgumentError("unknown backbone preset '" + preset + "'");
}

std::size_t parameter_count(const BackboneParams &b) {
  std::size_t n = 0;
  for (const auto &l : b.layers) n += l.weights.size() + l.bias.size();
  return n;
}

std::uint32_t backbone_checksum(const BackboneParams &b) {
  ByteWriter w;
  for (const auto &l : b.layers) {
    w.f64s(l.weights);
    w.f64s(l.bias);
  }
  return crc32_of(w.bytes());
}

HeadParams HeadParams::zeros(int embedding_dim) {
  HeadParams h;
  h.embedding_dim = embedding_dim;
  h.weights.assign(static_cast<std::size_t>(embedding_dim) * 2, 0.0);
  return h;
}

// --- forward / backward --------------------------------------------------------

Tensor image_to_tensor(const Image &img) {
  Tensor t(img.height, img.width, 3);
  t.data = img.pixels;
  return t;
}

namespace {

void check_input(const BackboneParams &b, const Image &img) {
  if (img.height != b.input_height || img.width != b.input_width ||
      img.pixels.size() != static_cast<std::size_t>(img.height) * img.width * 3)
    throw ShapeError("backbone '" + b.preset + "' expects " + std::to_string(b.input_height) + "x" +
                     std::to_string(b.input_width) + "x3 input, got " +
                     std::to_string(img.height) + "x" + std::to_string(img.width) + "x3");
}

Tensor layer_forward(const Layer &l, const Tensor &in, std::vector<std::uint32_t> *argmax) {
  switch (l.kind) {
    case LayerKind::conv:
      if (in.c != l.conv.in_ch)
        throw ShapeError("conv expects " + std::to_string(l.conv.in_ch) + " channels, got " +
                         std::to_string(in.c));
      return kernels::omp::conv2d_forward(in, l.conv, l.weights, l.bias);
    case LayerKind::relu: {
      Tensor out = in;
      for (double &v : out.data) v = v > 0.0 ? v : 0.0;
      return out;
    }
    case LayerKind::max_pool2: {
      auto r = kernels::omp::max_pool2_forward(in);
      if (argmax) *argmax = std::move(r.argmax);
      return std::move(r.out);
    }
    case LayerKind::global_avg_pool: {
      Tensor out(1, 1, in.c);
      const double inv = 1.0 / (static_cast<double>(in.h) * in.w);
      for (int y = 0; y < in.h; ++y)
        for (int x = 0; x < in.w; ++x)
          for (int c = 0; c < in.c; ++c) out.data[c] += in.at(y, x, c);
      for (double &v : out.data) v *= inv;
      return out;
    }
    case LayerKind::flatten: {
      Tensor out(1, 1, static_cast<int>(in.size()));
      out.data = in.data;
      return out;
    }
    case LayerKind::linear: {
      if (static_cast<int>(in.size()) != l.in_features)
        throw ShapeError("linear expects " + std::to_string(l.in_features) + " inputs, got " +
                         std::to_string(in.size()));
      Tensor out(1, 1, l.out_features);
      for (int o = 0; o < l.out_features; ++o) {
        double acc = l.bias[o];
        const double *w = &l.weights[static_cast<std::size_t>(o) * l.in_features];
        for (int i = 0; i < l.in_features; ++i) acc += w[i] * in.data[i];
        out.data[o] = acc;
      }
      return out;
    }
  }
  throw CorruptWeightsError("unknown layer kind");
}

}  // namespace

BackboneTrace embed_traced(const BackboneParams &backbone, const Image &image) {
  check_input(backbone, image);
  BackboneTrace t;
  t.activations.reserve(backbone.layers.size() + 1);
  t.pool_argmax.resize(backbone.layers.size());
  t.activations.push_back(image_to_tensor(image));
  for (std::size_t k = 0; k < backbone.layers.size(); ++k)
    t.activations.push_back(layer_forward(backbone.layers[k], t.activations.back(), &t.pool_argmax[k]));
  if (static_cast<int>(t.activations.back().size()) != backbone.embedding_dim)
    throw ShapeError("backbone produced " + std::to_string(t.activations.back().size()) +
                     " features, expected embedding_dim " + std::to_string(backbone.embedding_dim));
  return t;
}

std::vector<double> embed(const BackboneParams &backbone, const Image &image) {
  check_input(backbone, image);
  Tensor x = image_to_tensor(image);
  for (const auto &l : backbone.layers) x = layer_forward(l, x, nullptr);
  if (static_cast<int>(x.size()) != backbone.embedding_dim)
    throw ShapeError("backbone produced " + std::to_string(x.size()) +
                     " features, expected embedding_dim " + std::to_string(backbone.embedding_dim));
  return std::move(x.data);
}

std::vector<std::vector<double>> embed_batch(const BackboneParams &backbone,
                                             const std::vector<Image> &images) {
  std::vector<std::vector<double>> out(images.size());
  parallel_for(images.size(), [&](std::size_t i) { out[i] = embed(backbone, images[i]); });
  return out;
}

BackboneGrad backbone_backward(const BackboneParams &backbone, const BackboneTrace &trace,
                               std::span<const double> grad_embedding, bool want_params) {
  if (static_cast<int>(grad_embedding.size()) != backbone.embedding_dim)
    throw ShapeError("embedding gradient has length " + std::to_string(grad_embedding.size()) +
                     ", expected " + std::to_string(backbone.embedding_dim));
  BackboneGrad out;
  if (want_params) {
    out.params.resize(backbone.layers.size());
    for (std::size_t k = 0; k < backbone.layers.size(); ++k) {
      out.params[k].kind = backbone.layers[k].kind;
      out.params[k].conv = backbone.layers[k].conv;
      out.params[k].in_features = backbone.layers[k].in_features;
      out.params[k].out_features = backbone.layers[k].out_features;
    }
  }

  const Tensor &last = trace.activations.back();
  Tensor g(last.h, last.w, last.c);
  g.data.assign(grad_embedding.begin(), grad_embedding.end());

  for (std::size_t k = backbone.layers.size(); k-- > 0;) {
    const Layer &l = backbone.layers[k];
    const Tensor &in = trace.activations[k];
    switch (l.kind) {
      case LayerKind::conv: {
        if (want_params) {
          auto pg = kernels::omp::conv2d_backward_params(g, in, l.conv);
          out.params[k].weights = std::move(pg.weights);
          out.params[k].bias = std::move(pg.bias);
        }
        g = kernels::omp::conv2d_backward_input(g, l.conv, l.weights, in.h, in.w);
        break;
      }
      case LayerKind::relu: {
        Tensor gi(in.h, in.w, in.c);
        for (std::size_t i = 0; i < gi.size(); ++i) gi.data[i] = in.data[i] > 0.0 ? g.data[i] : 0.0;
        g = std::move(gi);
        break;
      }
      case LayerKind::max_pool2:
        g = kernels::omp::max_pool2_backward(g, trace.pool_argmax[k], in.h, in.w, in.c);
        break;
      case LayerKind::global_avg_pool: {
        Tensor gi(in.h, in.w, in.c);
        const double inv = 1.0 / (static_cast<double>(in.h) * in.w);
        for (int y = 0; y < in.h; ++y)
          for (int x = 0; x < in.w; ++x)
            for (int c = 0; c < in.c; ++c) gi.at(y, x, c) = g.data[c] * inv;
        g = std::move(gi);
        break;
      }
      case LayerKind::flatten: {
        Tensor gi(in.h, in.w, in.c);
        gi.data = g.data;
        g = std::move(gi);
        break;
      }
      case LayerKind::linear: {
        if (want_params) {
          auto &p = out.params[k];
          p.weights.assign(l.weights.size(), 0.0);
          p.bias.assign(g.data.begin(), g.data.end());
          for (int o = 0; o < l.out_features; ++o)
            for (int i = 0; i < l.in_features; ++i)
              p.weights[static_cast<std::size_t>(o) * l.in_features + i] = g.data[o] * in.data[i];
        }
        Tensor gi(in.h, in.w, in.c);
        for (int o = 0; o < l.out_features; ++o) {
          const double go = g.data[o];
          const double *w = &l.weights[static_cast<std::size_t>(o) * l.in_features];
          for (int i = 0; i < l.in_features; ++i) gi.data[i] += go * w[i];
        }
        g = std::move(gi);
        break;
      }
    }
  }
  out.input = std::move(g);
  return out;
}

// --- head ------------------------------------------------------------------------

std::array<double, 2> softmax(const std::array<double, 2> &logits) {
  const double m = std::max(logits[0], logits[1]);
  const double e0 = std::exp(logits[0] - m), e1 = std::exp(logits[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

namespace {
void check_embedding(const HeadParams &head, std::span<const double> embedding) {
  if (static_cast<int>(embedding.size()) != head.embedding_dim)
    throw ShapeError("head expects embedding of length " + std::to_string(head.embedding_dim) +
                     ", got " + std::to_string(embedding.size()));
}
}  // namespace

ForwardTrace head_forward(const HeadParams &head, std::span<const double> embedding) {
  check_embedding(head, embedding);
  ForwardTrace t;
  t.embedding.assign(embedding.begin(), embedding.end());
  t.logits = head.bias;
  for (int d = 0; d < head.embedding_dim; ++d) {
    t.logits[0] += head.w(d, 0) * embedding[d];
    t.logits[1] += head.w(d, 1) * embedding[d];
  }
  t.probabilities = softmax(t.logits);
  return t;
}

double cross_entropy(const std::array<double, 2> &probabilities, Label truth) {
  const double p = std::max(probabilities[class_index(truth)], 1e-12);
  const double loss = -std::log(p);
  return loss > 0.0 ? loss : 0.0;  // folds -0.0 at p == 1
}

HeadGrad head_gradient(const HeadParams &head, std::span<const double> embedding, Label truth) {
  const auto t = head_forward(head, embedding);
  HeadGrad g;
  g.bias = t.probabilities;
  g.bias[class_index(truth)] -= 1.0;
  g.weights.resize(head.weights.size());
  for (int d = 0; d < head.embedding_dim; ++d) {
    g.weights[static_cast<std::size_t>(d) * 2] = embedding[d] * g.bias[0];
    g.weights[static_cast<std::size_t>(d) * 2 + 1] = embedding[d] * g.bias[1];
  }
  return g;
}

Prediction prediction_from_probabilities(const std::array<double, 2> &p) {
  Prediction out;
  out.probabilities = p;
  if (p[1] >= p[0]) {
    out.label = Label::abandoned;
    out.confidence = p[1];
  } else {
    out.label = Label::background;
    out.confidence = p[0];
  }
  return out;
}

Prediction predict(const BackboneParams &backbone, const HeadParams &head, const Image &image) {
  if (head.embedding_dim != backbone.embedding_dim)
    throw ShapeError("head embedding_dim " + std::to_string(head.embedding_dim) +
                     " != backbone embedding_dim " + std::to_string(backbone.embedding_dim));
  return prediction_from_probabilities(head_forward(head, embed(backbone, image)).probabilities);
}

// --- weights file ----------------------------------------------------------------

namespace {

constexpr char kWeightsMagic[5] = {'V', 'G', 'L', 'W', '1'};

std::size_t expected_weight_count(const Layer &l) {
  switch (l.kind) {
    case LayerKind::conv: return l.conv.weight_count();
    case LayerKind::linear: return static_cast<std::size_t>(l.in_features) * l.out_features;
    default: return 0;
  }
}

std::size_t expected_bias_count(const Layer &l) {
  switch (l.kind) {
    case LayerKind::conv: return static_cast<std::size_t>(l.conv.out_ch);
    case LayerKind::linear: return static_cast<std::size_t>(l.out_features);
    default: return 0;
  }
}

}  // namespace

std::vector<std::uint8_t> encode_weights(const BackboneParams &backbone, const HeadParams &head) {
  if (head.embedding_dim != backbone.embedding_dim)
    throw DimensionError("head embedding_dim " + std::to_string(head.embedding_dim) +
                         " != backbone embedding_dim " + std::to_string(backbone.embedding_dim));
  ByteWriter p;
  p.str(backbone.preset);
  p.u32(static_cast<std::uint32_t>(backbone.input_height));
  p.u32(static_cast<std::uint32_t>(backbone.input_width));
  p.u32(backbone.frozen ? 1u : 0u);
  p.u32(static_cast<std::uint32_t>(backbone.embedding_dim));
  p.u32(static_cast<std::uint32_t>(backbone.layers.size()));
  for (const auto &l : backbone.layers) {
    p.u32(static_cast<std::uint32_t>(l.kind));
    if (l.kind == LayerKind::conv) {
      p.u32(l.conv.in_ch);
      p.u32(l.conv.out_ch);
      p.u32(l.conv.kernel);
      p.u32(l.conv.stride);
      p.u32(l.conv.pad);
    } else if (l.kind == LayerKind::linear) {
      p.u32(l.in_features);
      p.u32(l.out_features);
      p.u32(0);
      p.u32(0);
      p.u32(0);
    } else {
      for (int i = 0; i < 5; ++i) p.u32(0);
    }
  }
  for (const auto &l : backbone.layers) {
    p.f64s(l.weights);
    p.f64s(l.bias);
  }
  p.u32(static_cast<std::uint32_t>(head.embedding_dim));
  p.u32(2);
  p.f64s(head.weights);
  p.f64s(head.bias);

  std::vector<std::uint8_t> out(std::begin(kWeightsMagic), std::end(kWeightsMagic));
  const auto &payload = p.bytes();
  out.insert(out.end(), payload.begin(), payload.end());
  const std::uint32_t crc = crc32_of(payload);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
  return out;
}

void decode_weights(std::span<const std::uint8_t> bytes, BackboneParams &backbone, HeadParams &head,
                    std::optional<int> expected_embedding_dim) {
  if (bytes.size() < sizeof kWeightsMagic + 4 ||
      !std::equal(std::begin(kWeightsMagic), std::end(kWeightsMagic), bytes.begin()))
    throw CorruptWeightsError("not a VGLW1 weights file");
  const auto payload = bytes.subspan(sizeof kWeightsMagic, bytes.size() - sizeof kWeightsMagic - 4);
  ByteReader tail(bytes.subspan(bytes.size() - 4));
  if (tail.u32() != crc32_of(payload)) throw CorruptWeightsError("weights checksum mismatch");

  ByteReader r(payload);
  BackboneParams b;
  b.preset = r.str();
  b.input_height = static_cast<int>(r.u32());
  b.input_width = static_cast<int>(r.u32());
  b.frozen = r.u32() != 0;
  b.embedding_dim = static_cast<int>(r.u32());
  if (expected_embedding_dim && *expected_embedding_dim != b.embedding_dim)
    throw DimensionError("weights have embedding_dim " + std::to_string(b.embedding_dim) +
                         ", expected " + std::to_string(*expected_embedding_dim));
  const std::uint32_t nlayers = r.u32();
  if (nlayers > 1024) throw CorruptWeightsError("implausible layer count");
  b.layers.resize(nlayers);
  for (auto &l : b.layers) {
    const std::uint32_t kind = r.u32();
    if (kind < 1 || kind > 6) throw CorruptWeightsError("unknown layer kind " + std::to_string(kind));
    l.kind = static_cast<LayerKind>(kind);
    std::uint32_t d[5];
    for (auto &x : d) x = r.u32();
    if (l.kind == LayerKind::conv) {
      l.conv = ConvShape{static_cast<int>(d[0]), static_cast<int>(d[1]), static_cast<int>(d[2]),
                         static_cast<int>(d[3]), static_cast<int>(d[4])};
      if (l.conv.stride < 1 || l.conv.kernel < 1) throw CorruptWeightsError("bad conv header");
    } else if (l.kind == LayerKind::linear) {
      l.in_features = static_cast<int>(d[0]);
      l.out_features = static_cast<int>(d[1]);
    }
  }
  for (auto &l : b.layers) {
    l.weights = r.f64s(expected_weight_count(l));
    l.bias = r.f64s(expected_bias_count(l));
  }
  HeadParams h;
  h.embedding_dim = static_cast<int>(r.u32());
  const std::uint32_t classes = r.u32();
  if (classes != 2) throw CorruptWeightsError("head must have 2 classes");
  if (h.embedding_dim != b.embedding_dim)
    throw DimensionError("head rows " + std::to_string(h.embedding_dim) +
                         " != backbone embedding_dim " + std::to_string(b.embedding_dim));
  h.weights = r.f64s(static_cast<std::size_t>(h.embedding_dim) * 2);
  h.bias[0] = r.f64();
  h.bias[1] = r.f64();
  if (r.remaining() != 0) throw CorruptWeightsError("trailing bytes in weights payload");
  backbone = std::move(b);
  head = std::move(h);
}

std::vector<std::uint8_t> read_binary_file(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_binary_file(const std::string &path, std::span<const std::uint8_t> bytes) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  os.write(reinterpret_cast<const char *>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!os) throw IoError("write failed for '" + path + "'");
}

void save_weights(const BackboneParams &backbone, const HeadParams &head, const std::string &path) {
  write_binary_file(path, encode_weights(backbone, head));
}

std::pair<BackboneParams, HeadParams> load_weights(const std::string &path,
                                                   std::optional<int> expected_embedding_dim) {
  const auto bytes = read_binary_file(path);
  std::pair<BackboneParams, HeadParams> out;
  decode_weights(bytes, out.first, out.second, expected_embedding_dim);
  return out;
}

}  // namespace vigil
