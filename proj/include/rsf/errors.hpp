#pragma once

#include <stdexcept>
#include <string>

namespace rsf {

/// Base class for every error raised by the library. The CLI maps
/// InputError subclasses to exit status 2 and everything else to 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public InputError {
 public:
  using InputError::InputError;
};

class ShapeError : public InputError {
 public:
  using InputError::InputError;
};

class ParameterError : public InputError {
 public:
  using InputError::InputError;
};

class FormatError : public InputError {
 public:
  using InputError::InputError;
};

class InvalidTransformError : public InputError {
 public:
  using InputError::InputError;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CompressionError : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Raised when the input carries no usable information (constant image,
// single-bin histogram, a class without seeds).
class DegenerateError : public Error {
 public:
  using Error::Error;
};

class SeedingError : public DegenerateError {
 public:
  using DegenerateError::DegenerateError;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

class EvaluationError : public Error {
 public:
  using Error::Error;
};

}  // namespace rsf
