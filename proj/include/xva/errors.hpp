#pragma once

#include <stdexcept>
#include <string>

namespace xva {

// Base class for all engine errors so callers can catch one type at the CLI
// boundary and map it to an exit code.
struct EngineError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical failures (exit code 2 at the CLI).
struct NumericalError : EngineError {
    using EngineError::EngineError;
};

struct ZeroPivot : NumericalError {
    explicit ZeroPivot(std::size_t row)
        : NumericalError("tridiagonal elimination hit a near-zero pivot at row " +
                         std::to_string(row)) {}
};

struct NoConvergence : NumericalError {
    NoConvergence(int iterations, double last_error, double tolerance)
        : NumericalError("fixed-point iteration did not converge after " +
                         std::to_string(iterations) + " iterations (error " +
                         std::to_string(last_error) + " > tolerance " +
                         std::to_string(tolerance) + ")") {}
};

struct NoBracket : NumericalError {
    explicit NoBracket(const std::string& what) : NumericalError(what) {}
};

// Input validation failures (exit code 1 at the CLI).
struct ValidationError : EngineError {
    using EngineError::EngineError;
};

struct InvalidGrid : ValidationError {
    using ValidationError::ValidationError;
};

struct GridMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct NegativeState : ValidationError {
    using ValidationError::ValidationError;
};

struct SlopeMismatch : ValidationError {
    using ValidationError::ValidationError;
};

struct FellerViolation : ValidationError {
    using ValidationError::ValidationError;
};

struct NegativePayoff : ValidationError {
    using ValidationError::ValidationError;
};

struct ParseError : ValidationError {
    ParseError(int line, const std::string& what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line(line) {}
    int line;
};

}  // namespace xva
