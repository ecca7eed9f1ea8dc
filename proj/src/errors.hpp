/* Copyright 2026 The csim Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CSIM_ERRORS_HPP_
#define CSIM_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace csim {

// Every error raised by the core derives from Error. The C API maps the
// category onto a status code, and the CLI maps that onto its exit code.
enum class ErrorCategory {
  kUsage,    // bad configuration or arguments
  kData,     // unreadable, malformed or out-of-range input files
  kNumeric,  // non-finite values during training
  kContract  // internal misuse (shape mismatch, stale tape)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& what)
      : std::runtime_error(what), category_(category) {}
  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what)
      : Error(ErrorCategory::kContract, what) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what)
      : Error(ErrorCategory::kContract, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what)
      : Error(ErrorCategory::kUsage, what) {}
};

class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what)
      : Error(ErrorCategory::kData, what) {}
};

// A value outside its documented domain (gold score, similarity, ...).
class RangeError : public Error {
 public:
  explicit RangeError(const std::string& what)
      : Error(ErrorCategory::kData, what) {}
};

class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorCategory::kNumeric, what) {}
};

}  // namespace csim

#endif  // CSIM_ERRORS_HPP_
