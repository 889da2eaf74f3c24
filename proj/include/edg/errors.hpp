#pragma once

#include <stdexcept>
#include <string>

namespace edg {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RangeError : public Error { using Error::Error; };
class AbsoluteContinuityError : public Error { using Error::Error; };
class PositivityError : public Error { using Error::Error; };
class OverflowError : public Error { using Error::Error; };
class StiffnessError : public Error { using Error::Error; };
class StepTooLargeError : public Error { using Error::Error; };
class InconsistentPairError : public Error { using Error::Error; };
class SizeError : public Error { using Error::Error; };
class SupportError : public Error { using Error::Error; };
class EmptyError : public Error { using Error::Error; };

/// Requested density exceeds what the equilibrium family can carry.
class SupercriticalError : public Error {
public:
    SupercriticalError(const std::string& what, double rho_c)
        : Error(what), rho_c_(rho_c) {}
    double rho_c() const { return rho_c_; }

private:
    double rho_c_;
};

/// No lattice state within the certified recovery ball.
class InfeasibleError : public Error {
public:
    InfeasibleError(const std::string& what, double bound)
        : Error(what), bound_(bound) {}
    double bound() const { return bound_; }

private:
    double bound_;
};

/// Configuration problem, pinned to a line and a field name.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line, std::string field)
        : Error(what), line_(line), field_(std::move(field)) {}
    int line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace edg
