#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mtad {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand extents do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Sequence shorter than a convolution kernel.
class SequenceTooShort : public ShapeError {
 public:
  using ShapeError::ShapeError;
};

/// NaN/Inf produced, divergence, or a failed factorization.
class NumericError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public NumericError {
 public:
  NotPositiveDefinite(std::size_t pivot, double value)
      : NumericError("matrix is not positive definite (pivot " + std::to_string(pivot) +
                     " = " + std::to_string(value) + ")"),
        pivot_(pivot) {}

  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

/// Malformed or semantically invalid input data.
class DataError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class CheckpointError : public Error {
 public:
  enum class Kind { VersionMismatch, ShapeMismatch, Truncated, Malformed, MissingParam };

  CheckpointError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace mtad
