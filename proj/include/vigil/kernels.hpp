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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace vigil {

/// Activation tensor, height x width x channels, channel-fastest (HWC).
struct Tensor {
  int h = 0, w = 0, c = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int h_, int w_, int c_, double fill = 0.0)
      : h(h_), w(w_), c(c_), data(static_cast<std::size_t>(h_) * w_ * c_, fill) {}

  std::size_t index(int y, int x, int ch) const {
    return (static_cast<std::size_t>(y) * w + x) * c + ch;
  }
  double &at(int y, int x, int ch) { return data[index(y, x, ch)]; }
  double at(int y, int x, int ch) const { return data[index(y, x, ch)]; }
  std::size_t size() const { return data.size(); }

  friend bool operator==(const Tensor &, const Tensor &) = default;
};

/// Square convolution with zero padding. Weights are laid out
/// [out][ky][kx][in]; one bias per output channel.
struct ConvShape {
  int in_ch = 0;
  int out_ch = 0;
  int kernel = 3;
  int stride = 1;
  int pad = 1;

  std::size_t weight_count() const {
    return static_cast<std::size_t>(out_ch) * kernel * kernel * in_ch;
  }
  int out_h(int in_h) const { return (in_h + 2 * pad - kernel) / stride + 1; }
  int out_w(int in_w) const { return (in_w + 2 * pad - kernel) / stride + 1; }
  std::size_t widx(int o, int ky, int kx, int i) const {
    return ((static_cast<std::size_t>(o) * kernel + ky) * kernel + kx) * in_ch + i;
  }
};

struct PoolResult {
  Tensor out;
  std::vector<std::uint32_t> argmax;  // flat input index per output element
};

struct ConvParamGrad {
  std::vector<double> weights;
  std::vector<double> bias;
};

// Two implementations of every kernel. `serial` is the plain reference used
// by the tests and benchmarks; `omp` is what the model runs. Forward kernels
// and pooling use the same per-element accumulation order in both, so their
// outputs are bit-identical; the backward kernels differ in order (scatter vs
// gather) and agree to rounding.

namespace kernels::serial {
Tensor conv2d_forward(const Tensor &in, const ConvShape &s, std::span<const double> weights,
                      std::span<const double> bias);
Tensor conv2d_backward_input(const Tensor &grad_out, const ConvShape &s,
                             std::span<const double> weights, int in_h, int in_w);
ConvParamGrad conv2d_backward_params(const Tensor &grad_out, const Tensor &in, const ConvShape &s);
PoolResult max_pool2_forward(const Tensor &in);
Tensor max_pool2_backward(const Tensor &grad_out, const std::vector<std::uint32_t> &argmax,
                          int in_h, int in_w, int ch);
}  // namespace kernels::serial

namespace kernels::omp {
Tensor conv2d_forward(const Tensor &in, const ConvShape &s, std::span<const double> weights,
                      std::span<const double> bias);
Tensor conv2d_backward_input(const Tensor &grad_out, const ConvShape &s,
                             std::span<const double> weights, int in_h, int in_w);
ConvParamGrad conv2d_backward_params(const Tensor &grad_out, const Tensor &in, const ConvShape &s);
PoolResult max_pool2_forward(const Tensor &in);
Tensor max_pool2_backward(const Tensor &grad_out, const std::vector<std::uint32_t> &argmax,
                          int in_h, int in_w, int ch);
}  // namespace kernels::omp

/// Number of OpenMP threads the parallel kernels will use.
int kernel_threads();

}  // namespace vigil
