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

#include "vigil/train.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <sstream>

#include "vigil/binio.hpp"
#include "vigil/error.hpp"
#include "vigil/parallel.hpp"
#include "vigil/textio.hpp"

namespace vigil {

void validate(const TrainConfig &c) {
  if (c.total_steps < 1) throw InvalidArgumentError("total_steps must be >= 1");
  if (!(c.initial_lr > 0.0)) throw InvalidArgumentError("initial_lr must be > 0");
  if (!(c.lr_decay > 0.0 && c.lr_decay <= 1.0)) throw InvalidArgumentError("lr_decay must be in (0, 1]");
  if (c.decay_interval_steps < 1) throw InvalidArgumentError("decay_interval_steps must be >= 1");
  if (c.batch_size < 1) throw InvalidArgumentError("batch_size must be >= 1");
  if (c.eval_interval_steps < 1) throw InvalidArgumentError("eval_interval_steps must be >= 1");
}

double lr_at_step(const TrainConfig &config, std::int64_t step) {
  const std::int64_t k = std::max<std::int64_t>(step, 0) / config.decay_interval_steps;
  double lr = config.initial_lr;
  // Repeated multiplication, not pow(): 0.1 * 0.16 must give 0.016 exactly.
  for (std::int64_t i = 0; i < k && lr > 0.0; ++i) lr *= config.lr_decay;
  return lr;
}

TrainState init_state(const TrainConfig &config, BackboneParams backbone, HeadParams head) {
  validate(config);
  if (head.embedding_dim != backbone.embedding_dim)
    throw DimensionError("head embedding_dim " + std::to_string(head.embedding_dim) +
                         " != backbone embedding_dim " + std::to_string(backbone.embedding_dim));
  TrainState s;
  s.step = 0;
  backbone.frozen = config.freeze_backbone;
  s.backbone = std::move(backbone);
  s.head = std::move(head);
  s.rng.seed(derive_seed(config.seed, 0x747261696eULL));
  return s;
}

namespace {

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

struct HeadAccum {
  std::vector<double> weights;
  std::array<double, 2> bias{};
  double loss = 0;
};

// Sums per-example loss and head gradient in batch order.
HeadAccum accumulate_head(const HeadParams &head, const std::vector<std::vector<double>> &emb,
                          const std::vector<Label> &labels) {
  HeadAccum acc;
  acc.weights.assign(head.weights.size(), 0.0);
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const auto t = head_forward(head, emb[i]);
    acc.loss += cross_entropy(t.probabilities, labels[i]);
    const auto g = head_gradient(head, emb[i], labels[i]);
    for (std::size_t k = 0; k < g.weights.size(); ++k) acc.weights[k] += g.weights[k];
    acc.bias[0] += g.bias[0];
    acc.bias[1] += g.bias[1];
  }
  return acc;
}

void apply_head_update(HeadParams &head, const HeadAccum &acc, double lr, double inv_n) {
  for (std::size_t k = 0; k < head.weights.size(); ++k) head.weights[k] -= lr * (acc.weights[k] * inv_n);
  head.bias[0] -= lr * (acc.bias[0] * inv_n);
  head.bias[1] -= lr * (acc.bias[1] * inv_n);
}

void check_batch(const std::vector<Label> &labels, std::size_t n) {
  if (n == 0) throw InvalidArgumentError("empty training batch");
  if (labels.size() != n)
    throw ShapeError("batch has " + std::to_string(n) + " inputs but " + std::to_string(labels.size()) +
                     " labels");
}

}  // namespace

StepResult train_step_embedded(const TrainState &state,
                               const std::vector<std::vector<double>> &embeddings,
                               const std::vector<Label> &labels, const TrainConfig &config) {
  check_batch(labels, embeddings.size());
  const HeadAccum acc = accumulate_head(state.head, embeddings, labels);
  const double inv_n = 1.0 / static_cast<double>(embeddings.size());
  const double loss = acc.loss * inv_n;
  if (!std::isfinite(loss) || !all_finite(acc.weights) || !all_finite(acc.bias))
    throw DivergenceError(state.step);

  StepResult r{state, loss};
  apply_head_update(r.state.head, acc, lr_at_step(config, state.step), inv_n);
  if (!all_finite(r.state.head.weights) || !all_finite(r.state.head.bias))
    throw DivergenceError(state.step);
  ++r.state.step;
  return r;
}

StepResult train_step(const TrainState &state, const Batch &batch, const TrainConfig &config) {
  check_batch(batch.labels, batch.images.size());
  if (config.freeze_backbone)
    return train_step_embedded(state, embed_batch(state.backbone, batch.images), batch.labels, config);

  // End-to-end: per-example traces, head and backbone gradients.
  const std::size_t n = batch.images.size();
  std::vector<BackboneTrace> traces(n);
  parallel_for(n, [&](std::size_t i) { traces[i] = embed_traced(state.backbone, batch.images[i]); });
  std::vector<std::vector<double>> emb(n);
  for (std::size_t i = 0; i < n; ++i) emb[i] = traces[i].activations.back().data;

  const HeadAccum acc = accumulate_head(state.head, emb, batch.labels);
  std::vector<BackboneGrad> grads(n);
  parallel_for(n, [&](std::size_t i) {
    const auto t = head_forward(state.head, emb[i]);
    std::array<double, 2> dlogit = t.probabilities;
    dlogit[class_index(batch.labels[i])] -= 1.0;
    std::vector<double> demb(static_cast<std::size_t>(state.head.embedding_dim));
    for (int d = 0; d < state.head.embedding_dim; ++d)
      demb[d] = state.head.w(d, 0) * dlogit[0] + state.head.w(d, 1) * dlogit[1];
    grads[i] = backbone_backward(state.backbone, traces[i], demb, /*want_params=*/true);
  });

  const double inv_n = 1.0 / static_cast<double>(n);
  const double loss = acc.loss * inv_n;
  if (!std::isfinite(loss) || !all_finite(acc.weights) || !all_finite(acc.bias))
    throw DivergenceError(state.step);

  StepResult r{state, loss};
  const double lr = lr_at_step(config, state.step);
  apply_head_update(r.state.head, acc, lr, inv_n);
  for (std::size_t k = 0; k < r.state.backbone.layers.size(); ++k) {
    Layer &layer = r.state.backbone.layers[k];
    for (std::size_t j = 0; j < layer.weights.size(); ++j) {
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) sum += grads[i].params[k].weights[j];
      layer.weights[j] -= lr * (sum * inv_n);
    }
    for (std::size_t j = 0; j < layer.bias.size(); ++j) {
      double sum = 0;
      for (std::size_t i = 0; i < n; ++i) sum += grads[i].params[k].bias[j];
      layer.bias[j] -= lr * (sum * inv_n);
    }
    if (!all_finite(layer.weights) || !all_finite(layer.bias)) throw DivergenceError(state.step);
  }
  if (!all_finite(r.state.head.weights) || !all_finite(r.state.head.bias))
    throw DivergenceError(state.step);
  ++r.state.step;
  return r;
}

// --- training loop ---------------------------------------------------------------

namespace {

struct SplitEval {
  double loss = 0;
  double accuracy = 0;
};

SplitEval evaluate_embedded(const HeadParams &head, const std::vector<std::vector<double>> &emb,
                            const std::vector<Label> &labels) {
  double loss = 0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < emb.size(); ++i) {
    const auto t = head_forward(head, emb[i]);
    loss += cross_entropy(t.probabilities, labels[i]);
    if (prediction_from_probabilities(t.probabilities).label == labels[i]) ++correct;
  }
  const double n = static_cast<double>(emb.size());
  return {loss / n, static_cast<double>(correct) / n};
}

std::vector<std::vector<double>> embed_records(const BackboneParams &backbone, const Manifest &m,
                                               const std::vector<std::size_t> &idx,
                                               const ImageSource &src) {
  std::vector<std::vector<double>> out(idx.size());
  parallel_for(idx.size(), [&](std::size_t k) {
    out[k] = embed(backbone, load_record_image(src, m.records[idx[k]]));
  });
  return out;
}

std::vector<Label> labels_of(const Manifest &m, const std::vector<std::size_t> &idx) {
  std::vector<Label> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(m.records[i].label);
  return out;
}

void write_curves_if(const TrainOutputs &out, const std::vector<CurvePoint> &curves) {
  if (!out.curves_path.empty()) write_text_file(out.curves_path, serialize_curves(curves));
}

}  // namespace

TrainResult run_training(const TrainConfig &config, const Manifest &manifest,
                         const ImageSource &source, TrainState state, const TrainOutputs &outputs) {
  validate(config);
  if (state.step > config.total_steps)
    throw InvalidArgumentError("state step " + std::to_string(state.step) + " exceeds total_steps");
  const Manifest shuffled = shuffle_within_split(manifest, config.seed);
  const auto train_idx = shuffled.indices(Split::train);
  const auto val_idx = shuffled.indices(Split::val);
  if (train_idx.empty()) throw EmptySplitError("train split is empty");
  if (val_idx.empty()) throw EmptySplitError("val split is empty");
  const auto bs = static_cast<std::size_t>(config.batch_size);
  const std::size_t nb = train_idx.size() / bs;
  if (nb == 0)
    throw InvalidArgumentError("train split has " + std::to_string(train_idx.size()) +
                               " frames, fewer than batch_size " + std::to_string(bs));

  const bool frozen = config.freeze_backbone;
  const std::vector<Label> train_labels = labels_of(shuffled, train_idx);
  const std::vector<Label> val_labels = labels_of(shuffled, val_idx);
  // With a frozen backbone every frame's embedding is fixed, so compute once.
  std::vector<std::vector<double>> train_emb, val_emb;
  if (frozen) {
    train_emb = embed_records(state.backbone, shuffled, train_idx, source);
    val_emb = embed_records(state.backbone, shuffled, val_idx, source);
  }

  TrainResult result;
  try {
    while (state.step < config.total_steps) {
      const std::size_t b = static_cast<std::size_t>(state.step) % nb;
      const std::size_t begin = b * bs;
      std::vector<Label> labels(train_labels.begin() + static_cast<std::ptrdiff_t>(begin),
                                train_labels.begin() + static_cast<std::ptrdiff_t>(begin + bs));
      std::vector<std::vector<double>> emb;
      StepResult step;
      if (frozen) {
        emb.assign(train_emb.begin() + static_cast<std::ptrdiff_t>(begin),
                   train_emb.begin() + static_cast<std::ptrdiff_t>(begin + bs));
        step = train_step_embedded(state, emb, labels, config);
      } else {
        Batch batch = load_batch(shuffled, Split::train, b, bs, source);
        step = train_step(state, batch, config);
      }
      state = std::move(step.state);

      if (state.step % config.eval_interval_steps == 0) {
        if (!frozen) {
          std::vector<std::size_t> batch_idx(train_idx.begin() + static_cast<std::ptrdiff_t>(begin),
                                             train_idx.begin() + static_cast<std::ptrdiff_t>(begin + bs));
          emb = embed_records(state.backbone, shuffled, batch_idx, source);
          val_emb = embed_records(state.backbone, shuffled, val_idx, source);
        }
        const SplitEval tr = evaluate_embedded(state.head, emb, labels);
        const SplitEval va = evaluate_embedded(state.head, val_emb, val_labels);
        result.curves.push_back({state.step, tr.loss, tr.accuracy, va.loss, va.accuracy});
      }
      if (!outputs.checkpoint_path.empty() && outputs.checkpoint_every > 0 &&
          state.step % outputs.checkpoint_every == 0)
        save_checkpoint(state, config, outputs.checkpoint_path);
    }
  } catch (const DivergenceError &) {
    write_curves_if(outputs, result.curves);
    throw;
  }

  write_curves_if(outputs, result.curves);
  if (!outputs.checkpoint_path.empty()) save_checkpoint(state, config, outputs.checkpoint_path);
  result.state = std::move(state);
  return result;
}

TrainResult run_training(const TrainConfig &config, const Manifest &manifest,
                         const ImageSource &source, const BackboneParams &backbone_init,
                         const HeadParams &head_init, const TrainOutputs &outputs) {
  return run_training(config, manifest, source, init_state(config, backbone_init, head_init), outputs);
}

// --- curves file -----------------------------------------------------------------

std::string serialize_curves(const std::vector<CurvePoint> &curves) {
  std::ostringstream os;
  os << kCurvesHeader << '\n';
  for (const auto &p : curves)
    os << p.step << ',' << format_double(p.train_loss) << ',' << format_double(p.train_accuracy) << ','
       << format_double(p.val_loss) << ',' << format_double(p.val_accuracy) << '\n';
  return os.str();
}

std::vector<CurvePoint> parse_curves(const std::string &text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCurvesHeader) throw ParseError("missing curves header", 1);
  std::vector<CurvePoint> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_fields(line, ',');
    if (f.size() != 5) throw ParseError("expected 5 columns", lineno);
    const auto step = parse_int(f[0]);
    const auto a = parse_double(f[1]), b = parse_double(f[2]), c = parse_double(f[3]),
               d = parse_double(f[4]);
    if (!step || !a || !b || !c || !d) throw ParseError("malformed number", lineno);
    out.push_back({*step, *a, *b, *c, *d});
  }
  return out;
}

// --- checkpoints -----------------------------------------------------------------

namespace {
constexpr char kCheckpointMagic[5] = {'V', 'G', 'L', 'C', '1'};
}

std::vector<std::uint8_t> encode_checkpoint(const TrainState &state, const TrainConfig &config) {
  ByteWriter p;
  p.u64(static_cast<std::uint64_t>(state.step));
  p.u64(static_cast<std::uint64_t>(config.batch_size));
  p.u32(config.freeze_backbone ? 1u : 0u);
  p.u64(config.seed);
  std::ostringstream rng_text;
  rng_text << state.rng;
  p.str(rng_text.str());
  const auto weights = encode_weights(state.backbone, state.head);
  p.u64(weights.size());
  p.raw(weights.data(), weights.size());

  std::vector<std::uint8_t> out(std::begin(kCheckpointMagic), std::end(kCheckpointMagic));
  const auto &payload = p.bytes();
  out.insert(out.end(), payload.begin(), payload.end());
  const std::uint32_t crc = crc32_of(payload);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(crc >> (8 * i)));
  return out;
}

void save_checkpoint(const TrainState &state, const TrainConfig &config, const std::string &path) {
  write_binary_file(path, encode_checkpoint(state, config));
}

TrainState decode_checkpoint(std::span<const std::uint8_t> bytes, const TrainConfig &config,
                             const Manifest &manifest) {
  if (bytes.size() < sizeof kCheckpointMagic + 4 ||
      !std::equal(std::begin(kCheckpointMagic), std::end(kCheckpointMagic), bytes.begin()))
    throw CorruptWeightsError("not a VGLC1 checkpoint");
  const auto payload = bytes.subspan(sizeof kCheckpointMagic, bytes.size() - sizeof kCheckpointMagic - 4);
  ByteReader tail(bytes.subspan(bytes.size() - 4));
  if (tail.u32() != crc32_of(payload)) throw CorruptWeightsError("checkpoint checksum mismatch");

  ByteReader r(payload);
  TrainState s;
  s.step = static_cast<std::int64_t>(r.u64());
  const auto batch_size = static_cast<std::int64_t>(r.u64());
  const bool frozen = r.u32() != 0;
  const std::uint64_t seed = r.u64();
  const std::string rng_text = r.str();
  const auto wlen = r.u64();
  const auto wbytes = r.take(static_cast<std::size_t>(wlen));

  if (batch_size != config.batch_size)
    throw IncompatibleCheckpointError("checkpoint batch_size " + std::to_string(batch_size) +
                                      " != configured " + std::to_string(config.batch_size));
  if (frozen != config.freeze_backbone)
    throw IncompatibleCheckpointError("checkpoint freeze_backbone differs from configuration");
  if (seed != config.seed)
    throw IncompatibleCheckpointError("checkpoint seed " + std::to_string(seed) + " != configured " +
                                      std::to_string(config.seed));
  if (s.step > config.total_steps)
    throw IncompatibleCheckpointError("checkpoint step " + std::to_string(s.step) +
                                      " beyond total_steps " + std::to_string(config.total_steps));
  if (manifest.indices(Split::train).size() < static_cast<std::size_t>(batch_size))
    throw IncompatibleCheckpointError("manifest train split smaller than checkpoint batch_size");

  decode_weights(wbytes, s.backbone, s.head);
  std::istringstream is(rng_text);
  is >> s.rng;
  if (!is) throw CorruptWeightsError("bad generator state in checkpoint");
  return s;
}

TrainState resume(const std::string &path, const TrainConfig &config, const Manifest &manifest) {
  validate(config);
  return decode_checkpoint(read_binary_file(path), config, manifest);
}

}  // namespace vigil
