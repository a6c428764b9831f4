#pragma once

#include <stdexcept>
#include <string>

namespace tatekit {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input data (wrong degrees, unknown names, ...).
class InputError : public Error {
public:
  using Error::Error;
};

/// A documented precondition of an operation does not hold.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// A computation needs a slice beyond the depth/weight bounds it was given.
class TruncationError : public Error {
public:
  using Error::Error;
};

/// The index category has a shape the constructions do not handle.
class UnsupportedIndexError : public Error {
public:
  using Error::Error;
};

/// An internal consistency check failed; always signals a bug.
class IntegrityError : public Error {
public:
  using Error::Error;
};

} // namespace tatekit
