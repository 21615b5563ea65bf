// Copyright 2026 The WSDC Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WSDC_ERRORS_HPP_
#define WSDC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace wsdc {

// Invalid user-facing configuration (bad sizes, unknown keys, out-of-range
// hyperparameters). Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A caller violated an operation's preconditions (shape mismatch,
// out-of-range index, invalid pmf).
class ContractError : public std::invalid_argument {
 public:
  explicit ContractError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Problem size exceeds a solver's configured capacity.
class CapacityError : public std::runtime_error {
 public:
  explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// The requested operation is not supported for the given inputs
// (e.g. dual-based gradients from an exact plan without duals).
class UnsupportedError : public std::runtime_error {
 public:
  explicit UnsupportedError(const std::string& msg) : std::runtime_error(msg) {}
};

// A serialized artifact (model container, dataset file) failed validation.
// Maps to CLI exit code 3.
class ArtifactError : public std::runtime_error {
 public:
  explicit ArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite loss or other numerical failure. Maps to CLI exit code 4.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace wsdc

#endif  // WSDC_ERRORS_HPP_
