// Copyright 2026 The nbuplift Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NBUPLIFT_ERRORS_HPP_
#define NBUPLIFT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace nbuplift {

// Error categories. Each maps to a distinct CLI exit code.
enum class ErrorKind {
  kArgument,     // caller passed values outside an operation's domain
  kConfiguration,// inconsistent design / model selection / missing inputs
  kSchema,       // malformed input file
  kEstimation,   // bootstrap could not produce a usable estimate
  kConsistency,  // internal identity check failed
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ArgumentError : public Error {
 public:
  explicit ArgumentError(const std::string& what)
      : Error(ErrorKind::kArgument, what) {}
};

class ConfigurationError : public Error {
 public:
  explicit ConfigurationError(const std::string& what)
      : Error(ErrorKind::kConfiguration, what) {}
};

class SchemaError : public Error {
 public:
  explicit SchemaError(const std::string& what)
      : Error(ErrorKind::kSchema, what) {}
};

class EstimationError : public Error {
 public:
  explicit EstimationError(const std::string& what)
      : Error(ErrorKind::kEstimation, what) {}
};

class ConsistencyError : public Error {
 public:
  explicit ConsistencyError(const std::string& what)
      : Error(ErrorKind::kConsistency, what) {}
};

}  // namespace nbuplift

#endif  // NBUPLIFT_ERRORS_HPP_
