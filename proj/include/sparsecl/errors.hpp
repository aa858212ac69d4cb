#pragma once

#include <stdexcept>
#include <string>

namespace sparsecl {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file (wrong PNG bit depth, bad JSON schema, ...).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Data that cannot be processed (missing files, empty dataset, no valid pixels).
class DataError : public Error {
 public:
  using Error::Error;
};

/// A pooling kernel larger than the raster it is applied to.
class DegeneratePoolError : public Error {
 public:
  using Error::Error;
};

/// Tensor or raster dimensions that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Operation not permitted in the current state (e.g. recording a loss after the
/// curriculum finished).
class StateError : public Error {
 public:
  using Error::Error;
};

/// Evaluation over zero valid ground-truth pixels.
class EmptyEvaluationError : public DataError {
 public:
  using DataError::DataError;
};

/// Training diverged (non-finite loss).
class TrainingError : public Error {
 public:
  using Error::Error;
};

}  // namespace sparsecl
