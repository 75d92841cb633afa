#pragma once

#include <stdexcept>
#include <string>

namespace sic {

/// Caller violated a precondition (dimension mismatch, negative amplitude, ...).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Malformed or inconsistent experiment / waveform configuration.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Hermitian solve hit a non-positive or badly conditioned spectrum.
struct SingularMatrixError : std::runtime_error {
    SingularMatrixError(const std::string& what, double eigenvalue)
        : std::runtime_error(what), eigenvalue(eigenvalue) {}
    double eigenvalue;
};

/// Training diverged: non-finite values or a singular solve.
struct NumericalAbort : std::runtime_error {
    NumericalAbort(const std::string& what, std::size_t update)
        : std::runtime_error(what), update(update) {}
    std::size_t update;
};

}  // namespace sic
