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
#include <string>
#include <vector>

#include "vigil/labels.hpp"

namespace vigil {

/// Height x width x 3 image, interleaved (HWC), intensities nominally in [0,1].
struct Image {
  int height = 0;
  int width = 0;
  std::vector<double> pixels;

  Image() = default;
  Image(int h, int w, double fill = 0.0)
      : height(h), width(w), pixels(static_cast<std::size_t>(h) * w * 3, fill) {}

  static constexpr int channels = 3;

  double &at(int y, int x, int c) {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }
  double at(int y, int x, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * 3 + c];
  }

  friend bool operator==(const Image &, const Image &) = default;
};

/// Horizontal mirror. An involution, bit-exact.
Image flip_horizontal(const Image &img);

/// Luma (0.299, 0.587, 0.114) replicated to 3 channels. Pixels whose channels
/// are already equal pass through unchanged, so gray(gray(x)) == gray(x).
Image to_gray(const Image &img);

Image apply_variant(const Image &img, Variant v);

/// Clamp to [0,1], scale by 255, round half-up.
unsigned char quantize_intensity(double v);

/// 8-bit RGB PNG. Throws IoError.
void write_png(const std::string &path, const Image &img);
/// Decodes any PNG libpng understands into RGB in [0,1]. Throws IoError.
Image read_png(const std::string &path);

}  // namespace vigil
