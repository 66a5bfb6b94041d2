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

#include <cstdint>
#include <stdexcept>
#include <string>

namespace vigil {

/// Coarse classification used by the CLI to pick an exit code.
enum class ErrorClass {
  usage,      // bad arguments or specs supplied by the caller
  data,       // unreadable, malformed or inconsistent data / IO
  divergence  // numerical blow-up during training
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string &what, ErrorClass cls = ErrorClass::data)
      : std::runtime_error(what), cls_(cls) {}
  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

#define VIGIL_DEFINE_ERROR(Name, Cls)                  \
  class Name : public Error {                          \
   public:                                             \
    explicit Name(const std::string &what)             \
        : Error(what, ErrorClass::Cls) {}              \
  };

VIGIL_DEFINE_ERROR(InvalidSpecError, usage)
VIGIL_DEFINE_ERROR(InvalidArgumentError, usage)
VIGIL_DEFINE_ERROR(ShapeError, data)
VIGIL_DEFINE_ERROR(RangeError, usage)
VIGIL_DEFINE_ERROR(IoError, data)
VIGIL_DEFINE_ERROR(EmptyIngestError, data)
VIGIL_DEFINE_ERROR(InsufficientVideosError, data)
VIGIL_DEFINE_ERROR(DoubleAugmentationError, data)
VIGIL_DEFINE_ERROR(CorruptWeightsError, data)
VIGIL_DEFINE_ERROR(DimensionError, data)
VIGIL_DEFINE_ERROR(IncompatibleCheckpointError, data)
VIGIL_DEFINE_ERROR(EmptySplitError, data)
VIGIL_DEFINE_ERROR(ContaminationError, data)
VIGIL_DEFINE_ERROR(MetadataMissingError, data)

#undef VIGIL_DEFINE_ERROR

/// Malformed manifest / table file. Carries the 1-based offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string &what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what, ErrorClass::data),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Non-finite loss or gradient. Carries the step at which it was detected.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(std::int64_t step)
      : Error("training diverged at step " + std::to_string(step),
              ErrorClass::divergence),
        step_(step) {}
  std::int64_t step() const noexcept { return step_; }

 private:
  std::int64_t step_;
};

}  // namespace vigil
