/*
 * Copyright 2026 The augmetric Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace augmetric {

// Error categories map one-to-one onto CLI exit codes:
// usage = 2, data = 3, numeric = 4.
enum class ErrorCategory { usage = 2, data = 3, numeric = 4 };

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

// A caller-supplied value violates a precondition (negative sigma, empty
// score vector, non-symmetric matrix, ...).
struct ArgumentError : Error {
  explicit ArgumentError(const std::string& w) : Error(ErrorCategory::usage, w) {}
};

// Malformed configuration file or CLI usage.
struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCategory::usage, w) {}
};

// Two inputs that must share dimensions do not.
struct ShapeError : Error {
  explicit ShapeError(const std::string& w) : Error(ErrorCategory::data, w) {}
};

// A file does not conform to its declared format.
struct FormatError : Error {
  explicit FormatError(const std::string& w) : Error(ErrorCategory::data, w) {}
};

// A dataset is unreadable, empty, or contains invalid records.
struct DataError : Error {
  explicit DataError(const std::string& w) : Error(ErrorCategory::data, w) {}
};

// Too few samples or points for the requested statistic.
struct SampleSizeError : Error {
  explicit SampleSizeError(const std::string& w) : Error(ErrorCategory::data, w) {}
};

// An optimisation problem is underdetermined or failed structurally.
struct FitError : Error {
  explicit FitError(const std::string& w) : Error(ErrorCategory::data, w) {}
};

// A computation produced non-finite intermediate results.
struct NumericError : Error {
  explicit NumericError(const std::string& w) : Error(ErrorCategory::numeric, w) {}
};

// Collects non-fatal warnings emitted by operations that degrade gracefully
// (zero-sem jitter floor, degenerate renormalisation, low sample counts).
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string message) { warnings.push_back(std::move(message)); }
};

inline void maybe_warn(Diagnostics* diag, std::string message) {
  if (diag != nullptr) diag->warn(std::move(message));
}

}  // namespace augmetric
