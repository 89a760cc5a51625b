#pragma once

#include <stdexcept>
#include <string>

namespace muxillum {

/// Base of every error thrown by the library. The CLI maps subclasses to
/// exit codes (ParameterError -> 2, NumericalError -> 3, anything else -> 1).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid argument or configuration value.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A file could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// A file was readable but its contents are malformed.
class FormatError : public Error {
public:
    explicit FormatError(const std::string& file, const std::string& what)
        : Error(file + ": " + what), file_(file) {}
    const std::string& file() const noexcept { return file_; }

private:
    std::string file_;
};

/// A model directory failed to load; names the offending file.
class LoadError : public FormatError {
public:
    using FormatError::FormatError;
};

/// Two sources of the same quantity disagree (e.g. manifest N vs image count).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

/// Numerical failure: degenerate fits, singular systems.
class NumericalError : public Error {
public:
    using Error::Error;
};

class DegenerateFitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The normal matrix W^T S^-1 W is singular or its condition number exceeds
/// the configured threshold.
class ConditioningError : public NumericalError {
public:
    ConditioningError(const std::string& what, double condition)
        : NumericalError(what), condition_(condition) {}
    double condition() const noexcept { return condition_; }

private:
    double condition_;
};

}  // namespace muxillum
