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

#include <omp.h>

#include "vigil/kernels.hpp"

namespace vigil {

int kernel_threads() { return omp_get_max_threads(); }

namespace kernels::omp {

Tensor conv2d_forward(const Tensor &in, const ConvShape &s, std::span<const double> weights,
                      std::span<const double> bias) {
  Tensor out(s.out_h(in.h), s.out_w(in.w), s.out_ch);
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < out.h; ++oy) {
    for (int ox = 0; ox < out.w; ++ox) {
      double *dst = &out.data[out.index(oy, ox, 0)];
      for (int o = 0; o < s.out_ch; ++o) {
        double acc = bias[o];
        for (int ky = 0; ky < s.kernel; ++ky) {
          const int iy = oy * s.stride + ky - s.pad;
          if (iy < 0 || iy >= in.h) continue;
          for (int kx = 0; kx < s.kernel; ++kx) {
            const int ix = ox * s.stride + kx - s.pad;
            if (ix < 0 || ix >= in.w) continue;
            const double *src = &in.data[in.index(iy, ix, 0)];
            const double *w = &weights[s.widx(o, ky, kx, 0)];
            for (int i = 0; i < s.in_ch; ++i) acc += src[i] * w[i];
          }
        }
        dst[o] = acc;
      }
    }
  }
  return out;
}

// Gather form: each input element sums the output gradients that read it.
// Rows are independent, so the loop parallelises without atomics.
Tensor conv2d_backward_input(const Tensor &grad_out, const ConvShape &s,
                             std::span<const double> weights, int in_h, int in_w) {
  Tensor grad_in(in_h, in_w, s.in_ch);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < in_h; ++iy) {
    for (int ix = 0; ix < in_w; ++ix) {
      double *dst = &grad_in.data[grad_in.index(iy, ix, 0)];
      for (int ky = 0; ky < s.kernel; ++ky) {
        const int ty = iy + s.pad - ky;
        if (ty < 0 || ty % s.stride != 0) continue;
        const int oy = ty / s.stride;
        if (oy >= grad_out.h) continue;
        for (int kx = 0; kx < s.kernel; ++kx) {
          const int tx = ix + s.pad - kx;
          if (tx < 0 || tx % s.stride != 0) continue;
          const int ox = tx / s.stride;
          if (ox >= grad_out.w) continue;
          const double *g = &grad_out.data[grad_out.index(oy, ox, 0)];
          for (int o = 0; o < s.out_ch; ++o) {
            if (g[o] == 0.0) continue;
            const double *w = &weights[s.widx(o, ky, kx, 0)];
            for (int i = 0; i < s.in_ch; ++i) dst[i] += g[o] * w[i];
          }
        }
      }
    }
  }
  return grad_in;
}

ConvParamGrad conv2d_backward_params(const Tensor &grad_out, const Tensor &in, const ConvShape &s) {
  ConvParamGrad g{std::vector<double>(s.weight_count(), 0.0),
                  std::vector<double>(static_cast<std::size_t>(s.out_ch), 0.0)};
  // One output channel per task; each owns a disjoint slice of the gradient.
#pragma omp parallel for schedule(static)
  for (int o = 0; o < s.out_ch; ++o) {
    for (int oy = 0; oy < grad_out.h; ++oy)
      for (int ox = 0; ox < grad_out.w; ++ox) {
        const double go = grad_out.at(oy, ox, o);
        g.bias[o] += go;
        for (int ky = 0; ky < s.kernel; ++ky) {
          const int iy = oy * s.stride + ky - s.pad;
          if (iy < 0 || iy >= in.h) continue;
          for (int kx = 0; kx < s.kernel; ++kx) {
            const int ix = ox * s.stride + kx - s.pad;
            if (ix < 0 || ix >= in.w) continue;
            const double *src = &in.data[in.index(iy, ix, 0)];
            double *dst = &g.weights[s.widx(o, ky, kx, 0)];
            for (int i = 0; i < s.in_ch; ++i) dst[i] += go * src[i];
          }
        }
      }
  }
  return g;
}

PoolResult max_pool2_forward(const Tensor &in) {
  PoolResult r{Tensor(in.h / 2, in.w / 2, in.c), {}};
  r.argmax.resize(r.out.size());
#pragma omp parallel for schedule(static)
  for (int oy = 0; oy < r.out.h; ++oy)
    for (int ox = 0; ox < r.out.w; ++ox)
      for (int ch = 0; ch < in.c; ++ch) {
        std::size_t best = in.index(2 * oy, 2 * ox, ch);
        for (int dy = 0; dy < 2; ++dy)
          for (int dx = 0; dx < 2; ++dx) {
            const std::size_t k = in.index(2 * oy + dy, 2 * ox + dx, ch);
            if (in.data[k] > in.data[best]) best = k;
          }
        const std::size_t o = r.out.index(oy, ox, ch);
        r.out.data[o] = in.data[best];
        r.argmax[o] = static_cast<std::uint32_t>(best);
      }
  return r;
}

Tensor max_pool2_backward(const Tensor &grad_out, const std::vector<std::uint32_t> &argmax,
                          int in_h, int in_w, int ch) {
  Tensor grad_in(in_h, in_w, ch);
  // 2x2 windows with stride 2 never overlap: each input has at most one writer.
  const auto n = static_cast<long long>(grad_out.size());
#pragma omp parallel for schedule(static)
  for (long long o = 0; o < n; ++o) grad_in.data[argmax[o]] += grad_out.data[o];
  return grad_in;
}

}  // namespace kernels::omp
}  // namespace vigil
