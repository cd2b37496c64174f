#pragma once

#include <stdexcept>
#include <string>

namespace dlau {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A parameter is outside its valid domain (zero tile size, bad PWL width, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace dlau
