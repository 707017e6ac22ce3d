#pragma once

#include <stdexcept>
#include <string>

namespace nasbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed cell shape: non-square matrix, lower-triangular entries, wrong label count.
class StructuralError : public Error {
 public:
  using Error::Error;
};

/// Operation requires a valid cell (input->output path, edge limit).
class ValidityError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class MutationError : public Error {
 public:
  using Error::Error;
};

/// Space-index file is truncated, out of order or inconsistent with its header.
class CorruptionError : public Error {
 public:
  using Error::Error;
};

/// Metrics record violates the JSON-lines schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// Metrics file lacks some (epochs, trial) combinations for indexed cells.
class CompletenessError : public Error {
 public:
  using Error::Error;
};

class UnknownArchitectureError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A statistic is undefined for the given data (zero variance, too few points).
class UndefinedStatisticError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nasbench
