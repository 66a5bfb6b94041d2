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

#include "vigil/kernels.hpp"

namespace vigil::kernels::serial {

Tensor conv2d_forward(const Tensor &in, const ConvShape &s, std::span<const double> weights,
                      std::span<const double> bias) {
  Tensor out(s.out_h(in.h), s.out_w(in.w), s.out_ch);
  for (int oy = 0; oy < out.h; ++oy) {
    for (int ox = 0; ox < out.w; ++ox) {
      for (int o = 0; o < s.out_ch; ++o) {
        double acc = bias[o];
        for (int ky = 0; ky < s.kernel; ++ky) {
          const int iy = oy * s.stride + ky - s.pad;
          if (iy < 0 || iy >= in.h) continue;
          for (int kx = 0; kx < s.kernel; ++kx) {
            const int ix = ox * s.stride + kx - s.pad;
            if (ix < 0 || ix >= in.w) continue;
            for (int i = 0; i < s.in_ch; ++i) acc += in.at(iy, ix, i) * weights[s.widx(o, ky, kx, i)];
          }
        }
        out.at(oy, ox, o) = acc;
      }
    }
  }
  return out;
}

// Scatter form: every output gradient pushes into the inputs it touched.
Tensor conv2d_backward_input(const Tensor &grad_out, const ConvShape &s,
                             std::span<const double> weights, int in_h, int in_w) {
  Tensor grad_in(in_h, in_w, s.in_ch);
  for (int oy = 0; oy < grad_out.h; ++oy)
    for (int ox = 0; ox < grad_out.w; ++ox)
      for (int o = 0; o < s.out_ch; ++o) {
        const double g = grad_out.at(oy, ox, o);
        if (g == 0.0) continue;
        for (int ky = 0; ky < s.kernel; ++ky) {
          const int iy = oy * s.stride + ky - s.pad;
          if (iy < 0 || iy >= in_h) continue;
          for (int kx = 0; kx < s.kernel; ++kx) {
            const int ix = ox * s.stride + kx - s.pad;
            if (ix < 0 || ix >= in_w) continue;
            for (int i = 0; i < s.in_ch; ++i) grad_in.at(iy, ix, i) += g * weights[s.widx(o, ky, kx, i)];
          }
        }
      }
  return grad_in;
}

ConvParamGrad conv2d_backward_params(const Tensor &grad_out, const Tensor &in, const ConvShape &s) {
  ConvParamGrad g{std::vector<double>(s.weight_count(), 0.0),
                  std::vector<double>(static_cast<std::size_t>(s.out_ch), 0.0)};
  for (int oy = 0; oy < grad_out.h; ++oy)
    for (int ox = 0; ox < grad_out.w; ++ox)
      for (int o = 0; o < s.out_ch; ++o) {
        const double go = grad_out.at(oy, ox, o);
        g.bias[o] += go;
        for (int ky = 0; ky < s.kernel; ++ky) {
          const int iy = oy * s.stride + ky - s.pad;
          if (iy < 0 || iy >= in.h) continue;
          for (int kx = 0; kx < s.kernel; ++kx) {
            const int ix = ox * s.stride + kx - s.pad;
            if (ix < 0 || ix >= in.w) continue;
            for (int i = 0; i < s.in_ch; ++i) g.weights[s.widx(o, ky, kx, i)] += go * in.at(iy, ix, i);
          }
        }
      }
  return g;
}

PoolResult max_pool2_forward(const Tensor &in) {
  PoolResult r{Tensor(in.h / 2, in.w / 2, in.c), {}};
  r.argmax.resize(r.out.size());
  for (int oy = 0; oy < r.out.h; ++oy)
    for (int ox = 0; ox < r.out.w; ++ox)
      for (int ch = 0; ch < in.c; ++ch) {
        // First maximum in row-major scan order wins ties.
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
  for (std::size_t o = 0; o < grad_out.size(); ++o) grad_in.data[argmax[o]] += grad_out.data[o];
  return grad_in;
}

}  // namespace vigil::kernels::serial
