#pragma once

#include <stdexcept>
#include <string>

namespace vol32 {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid argument or parameter outside its mathematical domain.
struct DomainError : Error {
    explicit DomainError(const std::string& msg) : Error(msg) {}
};

/// A series or iteration failed to reach the requested tolerance.
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& msg) : Error(msg) {}
};

/// Quadrature could not meet the requested tolerance. Carries the best
/// estimate so callers can decide whether it is still usable.
struct ToleranceError : Error {
    double best_value;
    double error_estimate;
    ToleranceError(const std::string& msg, double value, double err)
        : Error(msg), best_value(value), error_estimate(err) {}
};

/// The discounted index would not be a martingale under the given
/// parameters; risk-neutral pricing is refused unless overridden.
struct MartingaleError : DomainError {
    explicit MartingaleError(const std::string& msg) : DomainError(msg) {}
};

}  // namespace vol32
