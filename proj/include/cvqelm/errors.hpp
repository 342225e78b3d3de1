#pragma once

#include <stdexcept>
#include <string>

namespace cvqelm {

/// Bad call arguments (range, dimension, configuration).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or non-finite input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input file does not match the documented schema.
class SchemaError : public DataError {
 public:
  using DataError::DataError;
};

/// A quantum state failed a physicality requirement.
class StateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fock truncation too small for the requested simulation.
class CutoffError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cvqelm
