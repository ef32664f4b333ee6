#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hypwander {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition on arguments failed (non-positive radius, zero polynomial, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A point lies on the boundary of, or outside, the domain it was passed with.
class DomainViolation : public Error {
public:
    using Error::Error;
};

/// Some intermediate modulus exceeded the overflow cutoff. `log_modulus` is the
/// natural log of the modulus reached (or an estimate of it) when evaluation stopped.
class EscapedToInfinity : public Error {
public:
    explicit EscapedToInfinity(double log_modulus)
        : Error("escaped to infinity (log|w| ~ " + std::to_string(log_modulus) + ")"),
          log_modulus_(log_modulus) {}

    double log_modulus() const noexcept { return log_modulus_; }

private:
    double log_modulus_;
};

/// log|f| is too small for the logarithmic-derivative quantities to make sense.
class NotInTract : public Error {
public:
    using Error::Error;
};

class QuadratureFailure : public Error {
public:
    using Error::Error;
};

/// The singular-value root scan found a window without a sign change.
class IncompleteSingularSet : public Error {
public:
    using Window = std::pair<double, double>;

    IncompleteSingularSet(std::string what, std::vector<Window> windows)
        : Error(std::move(what)), windows_(std::move(windows)) {}

    const std::vector<Window>& windows() const noexcept { return windows_; }

private:
    std::vector<Window> windows_;
};

}  // namespace hypwander
