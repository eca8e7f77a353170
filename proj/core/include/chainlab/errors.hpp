#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace chainlab {

/// Malformed input: bad configuration, out-of-range argument, inconsistent sizes.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical procedure failed to meet its tolerance. Carries the offending
/// value and the tolerance it was checked against.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double value, double tolerance)
        : std::runtime_error(what + " (value " + format(value) + ", tolerance " + format(tolerance) + ")"),
          value_(value), tolerance_(tolerance) {}

    double value() const noexcept { return value_; }
    double tolerance() const noexcept { return tolerance_; }

private:
    static std::string format(double x) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", x);
        return buf;
    }

    double value_;
    double tolerance_;
};

/// Non-positive eigenvalue of the mass-weighted Hessian.
class InstabilityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace chainlab
