// Copyright 2026 The GAMPS Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef GAMPS_ERROR_HPP
#define GAMPS_ERROR_HPP

#include <stdexcept>
#include <string>

namespace gamps {

/// Bad input detected before any work is done (CLI exit code 2).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Failure during a computation (CLI exit code 1).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Importance weights are undefined: the behavior policy assigns zero
/// probability to an action present in the data.
class InvalidDatasetError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

/// All weights are zero where at least one positive weight is required.
class ZeroWeightsError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

}  // namespace gamps

#endif  // GAMPS_ERROR_HPP
