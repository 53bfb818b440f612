#pragma once

#include <stdexcept>
#include <string>

namespace nlab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes or party counts do not fit together.
class DimensionError : public Error {
  public:
    using Error::Error;
};

/// A documented precondition of an operation was not met by the caller.
class PreconditionError : public Error {
  public:
    using Error::Error;
};

/// An argument violates a type invariant (non-finite entry, bad range, ...).
class InvalidArgument : public Error {
  public:
    using Error::Error;
};

/// Internal self-check failed. Indicates a bug, not bad input.
class InternalError : public Error {
  public:
    using Error::Error;
};

} // namespace nlab
