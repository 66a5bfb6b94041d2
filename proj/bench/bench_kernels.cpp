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

// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "vigil/kernels.hpp"
#include "vigil/model.hpp"
#include "vigil/rng.hpp"

namespace {

using namespace vigil;

struct ConvFixture {
  ConvShape shape;
  Tensor x;
  std::vector<double> w, b;
  Tensor grad;

  ConvFixture(int size, int in, int out) : shape{in, out, 3, 1, 1}, x(size, size, in), grad(size, size, out) {
    Rng rng(1);
    for (double &v : x.data) v = uniform(rng, -1, 1);
    for (double &v : grad.data) v = uniform(rng, -1, 1);
    w.resize(shape.weight_count());
    for (double &v : w) v = uniform(rng, -1, 1);
    b.assign(static_cast<std::size_t>(out), 0.1);
  }
};

template <bool Parallel>
void BM_ConvForward(benchmark::State &state) {
  const ConvFixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                      static_cast<int>(state.range(2)));
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(kernels::omp::conv2d_forward(f.x, f.shape, f.w, f.b));
    else
      benchmark::DoNotOptimize(kernels::serial::conv2d_forward(f.x, f.shape, f.w, f.b));
  }
}

template <bool Parallel>
void BM_ConvBackwardParams(benchmark::State &state) {
  const ConvFixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)),
                      static_cast<int>(state.range(2)));
  for (auto _ : state) {
    if constexpr (Parallel)
      benchmark::DoNotOptimize(kernels::omp::conv2d_backward_params(f.grad, f.x, f.shape));
    else
      benchmark::DoNotOptimize(kernels::serial::conv2d_backward_params(f.grad, f.x, f.shape));
  }
}

// Whole-batch embedding: embed_batch parallelises over images.
void BM_EmbedBatch(benchmark::State &state) {
  const BackboneParams b = make_tiny_v1(3);
  Rng rng(2);
  std::vector<Image> images(static_cast<std::size_t>(state.range(0)), Image(64, 64));
  for (auto &img : images)
    for (double &v : img.pixels) v = uniform01(rng);
  for (auto _ : state) benchmark::DoNotOptimize(embed_batch(b, images));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EmbedSequential(benchmark::State &state) {
  const BackboneParams b = make_tiny_v1(3);
  Rng rng(2);
  std::vector<Image> images(static_cast<std::size_t>(state.range(0)), Image(64, 64));
  for (auto &img : images)
    for (double &v : img.pixels) v = uniform01(rng);
  for (auto _ : state)
    for (const auto &img : images) benchmark::DoNotOptimize(embed(b, img));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ConvForward<false>)->Args({64, 3, 8})->Args({32, 8, 16})->Name("conv_forward/serial");
BENCHMARK(BM_ConvForward<true>)->Args({64, 3, 8})->Args({32, 8, 16})->Name("conv_forward/omp");
BENCHMARK(BM_ConvBackwardParams<false>)->Args({64, 3, 8})->Args({32, 8, 16})->Name("conv_backward_params/serial");
BENCHMARK(BM_ConvBackwardParams<true>)->Args({64, 3, 8})->Args({32, 8, 16})->Name("conv_backward_params/omp");
BENCHMARK(BM_EmbedSequential)->Arg(32)->Name("embed/sequential");
BENCHMARK(BM_EmbedBatch)->Arg(32)->Name("embed/batch");
BENCHMARK_MAIN();
