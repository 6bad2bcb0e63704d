#pragma once

#include <stdexcept>
#include <string>

namespace wdsr {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input problems: malformed files, broken invariants, unknown ids.
// The CLI maps these to exit status 1.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  using InputError::InputError;
};

class ValidationError : public InputError {
 public:
  using InputError::InputError;
};

// Well-formed input on which a quantity is undefined (zero denominator,
// infeasible design, infeasible baseline). The CLI maps these to exit 2.
class ComputationError : public Error {
 public:
  using Error::Error;
};

class UndefinedInputError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class InfeasibleDesignError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class BaselineInfeasibleError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace wdsr
