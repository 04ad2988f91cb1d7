#pragma once

#include <stdexcept>
#include <string>

namespace wgm {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a model (e.g. wavelength outside the Sellmeier range).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A bracketed solve found no sign change.
class NoRootError : public Error {
public:
    using Error::Error;
};

/// Input violates a documented precondition (grid resolution, window size, peak count).
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Iterative method failed to converge within its budget.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Malformed file or configuration.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Mode outside the modeled family (m != l or q != 1).
class UnsupportedModeError : public Error {
public:
    using Error::Error;
};

}  // namespace wgm
