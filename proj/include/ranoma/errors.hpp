// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace ranoma {

// Raised when a config file or a deployment violates a structural invariant.
// The message names the offending field, beam, group, or cell.
class ValidationError : public std::runtime_error {
  public:
    explicit ValidationError(const std::string &what) : std::runtime_error(what) {}
};

// Raised when an iterative solver fails to converge within its budget.
class SolverError : public std::runtime_error {
  public:
    explicit SolverError(const std::string &what) : std::runtime_error(what) {}
};

// Raised when the closed-form and numeric solvers disagree beyond tolerance.
// This is a correctness gate, not a warning.
class SolverDisagreement : public SolverError {
  public:
    explicit SolverDisagreement(const std::string &what) : SolverError(what) {}
};

} // namespace ranoma
