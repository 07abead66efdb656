// Copyright 2026 The btow Authors
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

#ifndef BTOW_ERROR_H_
#define BTOW_ERROR_H_

#include <stdexcept>
#include <string>

namespace btow {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad input: a parameter, vertex or file violates a precondition.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// A fixed-point iteration hit its sweep cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long sweeps, double residual)
      : Error(what), sweeps_(sweeps), residual_(residual) {}

  long sweeps() const { return sweeps_; }
  double residual() const { return residual_; }

 private:
  long sweeps_;
  double residual_;
};

// An invariant that must hold by construction was observed to fail, e.g. a
// monotone iteration that moved in the wrong direction.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

// A checked mathematical property (monotonicity, sandwich, CEC) failed.
// The witness vertex is -1 when the failure is not attributable to a vertex.
class PropertyViolation : public Error {
 public:
  PropertyViolation(const std::string& what, int witness, double magnitude)
      : Error(what), witness_(witness), magnitude_(magnitude) {}

  int witness() const { return witness_; }
  double magnitude() const { return magnitude_; }

 private:
  int witness_;
  double magnitude_;
};

}  // namespace btow

#endif  // BTOW_ERROR_H_
