#pragma once

#include <stdexcept>
#include <string>

namespace kerr {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

class OutOfRange : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Raised by the numerical layers: solver failures the caller may want to
/// report with a distinct exit status.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The top of the truncated number basis became populated.
class TruncationOverflow : public NumericalError {
public:
    TruncationOverflow(const std::string& what, double time, double top_population)
        : NumericalError(what), time_(time), top_population_(top_population)
    {
    }

    double time() const noexcept { return time_; }
    double top_population() const noexcept { return top_population_; }

private:
    double time_;
    double top_population_;
};

class StepUnderflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Two independently computed quantities that must agree did not.
class ConsistencyError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace kerr
