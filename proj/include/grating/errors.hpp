#pragma once

#include <stdexcept>
#include <string>

namespace grating {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A parameter violates its documented constraint (negative rate, zero
/// saturation intensity, angle out of range, ...).
class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// Requested quantity has no well-defined value (e.g. steady coherence
/// with both write fields off).
class UndefinedValue : public Error {
public:
    using Error::Error;
};

/// The steady-state linear system is rank deficient; the null-space
/// dimension counts the free directions of the stationary family.
class DegenerateSteadyState : public Error {
public:
    DegenerateSteadyState(const std::string& msg, int null_space_dim)
        : Error(msg), null_space_dim_(null_space_dim) {}
    int null_space_dim() const { return null_space_dim_; }

private:
    int null_space_dim_;
};

/// A trajectory violated a physical invariant beyond tolerance.
class IntegrationDiverged : public Error {
public:
    using Error::Error;
};

/// Pulse analysis failed because the trace is cut off before the
/// required feature (half-maximum crossing) is reached.
class TruncatedPulse : public Error {
public:
    enum class Side { left, right };
    TruncatedPulse(const std::string& msg, Side side) : Error(msg), side_(side) {}
    Side side() const { return side_; }

private:
    Side side_;
};

/// Malformed input data file (CSV traces, grids).
class DataFormatError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace grating
