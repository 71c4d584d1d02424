// Copyright 2026 The contest-lab Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace contest {

/// Base class of every error raised by the library.
class ContestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input outside an operation's domain (negative stake, bad id, ...).
class DomainError : public ContestError {
 public:
  using ContestError::ContestError;
};

/// Operation not defined for this success-function kind.
class UnsupportedKindError : public ContestError {
 public:
  using ContestError::ContestError;
};

/// Malformed contest structure (e.g. extension of a non-exchangeable rule).
class StructureError : public ContestError {
 public:
  using ContestError::ContestError;
};

/// The acyclic solver was handed an automaton with a cycle.
class CycleError : public StructureError {
 public:
  using StructureError::StructureError;
};

/// Absorption is not almost sure under the equilibrium chain.
class DegenerateChainError : public ContestError {
 public:
  using ContestError::ContestError;
};

/// Bad user input at the serialization / CLI boundary.
class ValidationError : public ContestError {
 public:
  using ContestError::ContestError;
};

/// An iterative method stopped before reaching its tolerance.
class ConvergenceError : public ContestError {
 public:
  ConvergenceError(const std::string& what, double residual, long iterations)
      : ContestError(what + " (residual " + std::to_string(residual) + " after " +
                     std::to_string(iterations) + " iterations)"),
        residual_(residual),
        iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  long iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  long iterations_;
};

}  // namespace contest
