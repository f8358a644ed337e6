#pragma once

#include <stdexcept>
#include <string>

namespace hubdetect {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input parsed but violates a model invariant or operation precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Iterative solver hit its iteration cap.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Not enough data for a statistical fit.
class InsufficientDataError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

} // namespace hubdetect
