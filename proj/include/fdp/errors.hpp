// Copyright 2026 The fdpaudit Authors
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

#ifndef FDP_ERRORS_HPP_
#define FDP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace fdp {

// Bad arguments or inconsistent configuration. CLI exit code 2.
class InvalidParameterError : public std::invalid_argument {
 public:
  explicit InvalidParameterError(const std::string& what)
      : std::invalid_argument(what) {}
};

// A numerical routine failed to converge or left its valid regime.
// CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what)
      : std::runtime_error(what) {}
};

// A stated precondition of a theorem does not hold for these inputs
// (e.g. the CLT slack gamma >= 1/2, or a zero-variance privacy loss).
class AssumptionViolatedError : public NumericalError {
 public:
  explicit AssumptionViolatedError(const std::string& what)
      : NumericalError(what) {}
};

// Request exceeds a declared capacity limit. Guarantees are never silently
// approximated beyond the declared estimator.
class CapacityError : public InvalidParameterError {
 public:
  explicit CapacityError(const std::string& what)
      : InvalidParameterError(what) {}
};

class UnsupportedModeError : public InvalidParameterError {
 public:
  explicit UnsupportedModeError(const std::string& what)
      : InvalidParameterError(what) {}
};

}  // namespace fdp

#endif  // FDP_ERRORS_HPP_
