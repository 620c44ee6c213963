#pragma once

#include <stdexcept>
#include <string>

namespace hardattn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes of operands do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied value is outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Exact layer normalization (epsilon = 0) was asked to rescale a constant vector.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// NaN or infinity showed up where only finite values are allowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Malformed, truncated or incompatible serialized data.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace hardattn
