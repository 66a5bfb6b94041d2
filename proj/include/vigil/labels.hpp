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
#include <string>
#include <string_view>

namespace vigil {

/// Class order is fixed: index 0 = background, index 1 = abandoned.
/// "Positive" always means abandoned.
enum class Label : int { background = 0, abandoned = 1 };

enum class Variant : int { orig_color = 0, orig_gray = 1, flip_color = 2, flip_gray = 3 };

enum class Split : int { train = 0, val = 1, test = 2 };

inline constexpr int kNumClasses = 2;
inline constexpr std::array<Variant, 4> kAllVariants = {
    Variant::orig_color, Variant::orig_gray, Variant::flip_color, Variant::flip_gray};
inline constexpr std::array<Split, 3> kAllSplits = {Split::train, Split::val, Split::test};

inline constexpr int class_index(Label l) { return static_cast<int>(l); }
inline constexpr Label label_from_index(int i) {
  return i == 0 ? Label::background : Label::abandoned;
}

inline constexpr bool is_flipped(Variant v) {
  return v == Variant::flip_color || v == Variant::flip_gray;
}
inline constexpr bool is_gray(Variant v) {
  return v == Variant::orig_gray || v == Variant::flip_gray;
}

std::string_view to_string(Label l);
std::string_view to_string(Variant v);
std::string_view to_string(Split s);

// Parsers throw InvalidArgumentError on unknown names.
Label parse_label(std::string_view s);
Variant parse_variant(std::string_view s);
Split parse_split(std::string_view s);

}  // namespace vigil
