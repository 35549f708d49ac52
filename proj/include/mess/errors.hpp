#ifndef MESS_ERRORS_HPP
#define MESS_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mess {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates an invariant (non-finite entries, empty matrix, ...).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// A parameter is outside its admissible range.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input is structurally valid but degenerate for the requested operation
/// (zero diameter under a relative threshold, all-zero basis input, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A snapshot stream misbehaved (dimension change mid-stream).
class StreamError : public Error {
public:
    using Error::Error;
};

/// A file does not conform to its declared format. Messages carry the
/// byte offset or line at which parsing failed.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure (open, read, write).
class IoError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: integrator blow-up, factorization non-convergence,
/// or a violated error bound.
class NumericalError : public Error {
public:
    using Error::Error;
};

} // namespace mess

#endif
