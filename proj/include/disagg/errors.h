// Copyright 2026 The DisAgg Authors
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

#ifndef DISAGG_ERRORS_H_
#define DISAGG_ERRORS_H_

#include <stdexcept>
#include <string>

namespace disagg {

// Root of every error thrown by the library. The CLI maps subclasses onto
// exit codes, so new error kinds should derive from the closest category.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Caller supplied an unusable configuration or argument.
class ParameterError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class InvalidValueError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class FormatError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

class NoInverseError : public Error {
 public:
  using Error::Error;
};

// Interpolation nodes are not pairwise distinct.
class DegenerateBasisError : public Error {
 public:
  using Error::Error;
};

class InsufficientSharesError : public Error {
 public:
  using Error::Error;
};

class AggregationError : public Error {
 public:
  using Error::Error;
};

class EmptyAggregateError : public Error {
 public:
  using Error::Error;
};

// No committee satisfies the constraints. binding() names the constraint
// that ruled out the last candidate.
class NoSolutionError : public Error {
 public:
  NoSolutionError(const std::string& what, std::string binding)
      : Error(what), binding_(std::move(binding)) {}
  const std::string& binding() const { return binding_; }

 private:
  std::string binding_;
};

class AuthenticationError : public Error {
 public:
  using Error::Error;
};

class RoundFailureError : public Error {
 public:
  using Error::Error;
};

class ReconstructionFailureError : public Error {
 public:
  using Error::Error;
};

class ProtocolViolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace disagg

#endif  // DISAGG_ERRORS_H_
