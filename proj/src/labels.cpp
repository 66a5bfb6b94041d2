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

#include "vigil/labels.hpp"

#include "vigil/error.hpp"

namespace vigil {

std::string_view to_string(Label l) {
  return l == Label::abandoned ? "abandoned" : "background";
}

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::orig_color: return "orig-color";
    case Variant::orig_gray: return "orig-gray";
    case Variant::flip_color: return "flip-color";
    case Variant::flip_gray: return "flip-gray";
  }
  return "?";
}

std::string_view to_string(Split s) {
  switch (s) {
    case Split::train: return "train";
    case Split::val: return "val";
    case Split::test: return "test";
  }
  return "?";
}

Label parse_label(std::string_view s) {
  if (s == "abandoned") return Label::abandoned;
  if (s == "background") return Label::background;
  throw InvalidArgumentError("unknown label '" + std::string(s) + "'");
}

Variant parse_variant(std::string_view s) {
  for (Variant v : kAllVariants)
    if (to_string(v) == s) return v;
  throw InvalidArgumentError("unknown variant '" + std::string(s) + "'");
}

Split parse_split(std::string_view s) {
  for (Split sp : kAllSplits)
    if (to_string(sp) == s) return sp;
  throw InvalidArgumentError("unknown split '" + std::string(s) + "'");
}

}  // namespace vigil
