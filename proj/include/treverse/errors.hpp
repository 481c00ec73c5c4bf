#pragma once

#include <stdexcept>
#include <string>

namespace treverse {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// An operation's stated precondition does not hold (e.g. an incompatible
/// time-reversal map passed to a check that presumes compatibility).
class PreconditionError : public Error {
public:
    using Error::Error;
};

class InvalidOperation : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class NoAntisymmetricFamily : public Error {
public:
    using Error::Error;
};

class CapExceeded : public Error {
public:
    using Error::Error;
};

class CountOverflow : public Error {
public:
    using Error::Error;
};

class SignatureError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

class NotApplicable : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace treverse
