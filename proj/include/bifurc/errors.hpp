#pragma once

#include <stdexcept>
#include <string>

namespace bifurc {

/// Base class for every error thrown by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Malformed text input (mesh files, configs, nonlinearity strings).
struct ParseError : Error {
    ParseError(const std::string& what, long line = -1)
        : Error(line >= 0 ? what + " (line " + std::to_string(line) + ")" : what), line(line) {}
    long line;
};

/// A structural invariant of a validated object does not hold.
struct InvariantViolation : Error {
    using Error::Error;
};

/// Request would exceed a resource guard (e.g. mesh refinement depth).
struct ResourceError : Error {
    using Error::Error;
};

/// Element-level assembly failure (degenerate geometry).
struct AssemblyError : Error {
    using Error::Error;
};

/// Scalar function evaluation failed; carries the offending argument.
struct EvaluationError : Error {
    EvaluationError(const std::string& what, double value)
        : Error(what + " (value " + std::to_string(value) + ")"), value(value) {}
    double value;
};

/// Caller violated a documented precondition.
struct PreconditionError : Error {
    using Error::Error;
};

/// Iterative solve did not reach its tolerance; carries the last residual.
struct ConvergenceError : Error {
    ConvergenceError(const std::string& what, double last_residual, int iterations)
        : Error(what + " (residual " + std::to_string(last_residual) + " after " +
                std::to_string(iterations) + " iterations)"),
          last_residual(last_residual),
          iterations(iterations) {}
    double last_residual;
    int iterations;
};

}  // namespace bifurc
