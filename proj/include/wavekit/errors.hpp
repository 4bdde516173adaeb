#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavekit {

/// Expression text could not be parsed. Carries the byte offset of the
/// first offending character.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte " + std::to_string(offset) + ")"),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// A free name in an expression is not bound by the parameter table.
class UnknownIdentifier : public ParseError {
public:
    UnknownIdentifier(const std::string& name, std::size_t offset)
        : ParseError("unknown identifier '" + name + "'", offset) {}
};

/// Function called with the wrong number of arguments.
class ArityMismatch : public ParseError {
public:
    ArityMismatch(const std::string& name, std::size_t offset)
        : ParseError("function '" + name + "' expects exactly one argument", offset) {}
};

/// Evaluation left the real domain (sqrt of a negative beyond the clamp
/// window, log of a non-positive, division by zero, ...).
class EvalDomainError : public std::runtime_error {
public:
    EvalDomainError(const std::string& what, double u)
        : std::runtime_error(what + " at u = " + std::to_string(u)), u_(u) {}
    double u() const noexcept { return u_; }

private:
    double u_;
};

/// Base for failures of the numerical machinery (exit code 5 at the CLI).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// D vanishes identically on a stretch of the scan grid, so its zero set
/// cannot be finite.
class PlateauError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Doubling the quadrature grid moved a mean-value constant by more than
/// the accepted relative slack.
class GridNonConvergence : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// No feasible wave speed was found inside (or above) the analytic bracket.
class BracketFailure : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The adaptive integrator collapsed its step away from the interval ends.
class StepUnderflow : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// phi = z/D is numerically zero at an interior point that is not a zero
/// of D; signals an inconsistent upstream solution.
class PhiSingular : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace wavekit
