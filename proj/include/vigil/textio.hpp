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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vigil {

/// Shortest decimal form that parses back to the identical double.
std::string format_double(double v);

/// Fixed-point with `digits` decimals, for human-facing tables.
std::string format_fixed(double v, int digits);

/// "n/a" for an absent rate.
std::string format_rate(const std::optional<double> &v, int digits = -1);

/// Strict full-string parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);
std::optional<long long> parse_int(std::string_view s);

std::vector<std::string_view> split_fields(std::string_view line, char sep);

/// Writes `content` to `path` atomically enough for our purposes
/// (truncate + write). Throws IoError on failure.
void write_text_file(const std::string &path, const std::string &content);
std::string read_text_file(const std::string &path);

}  // namespace vigil
