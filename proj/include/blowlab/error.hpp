#pragma once

#include <stdexcept>
#include <string>

namespace blowlab {

// Base class for everything this library throws on purpose.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: malformed expression, invalid config field, precondition
// violation. CLI maps these to exit code 1.
struct ValidationError : Error {
    using Error::Error;
    ValidationError(const std::string& field, const std::string& msg)
        : Error(field + ": " + msg), field(field) {}
    std::string field;
};

// Parse failure with a character position into the source text.
struct ParseError : ValidationError {
    ParseError(std::size_t pos, const std::string& msg)
        : ValidationError("syntax error at position " + std::to_string(pos) + ": " + msg),
          position(pos) {}
    std::size_t position;
};

// Singular arithmetic during expression evaluation (division by zero,
// zero to a negative power).
struct EvalError : Error {
    using Error::Error;
};

// A run that failed for scientific reasons rather than bad input:
// no sign change across a shooting bracket, solver instability,
// blowup before the requested time. CLI maps these to exit code 2.
struct ScientificError : Error {
    using Error::Error;
};

// Pole of the gamma function, degenerate special-function parameters.
struct SpecialFunctionError : Error {
    using Error::Error;
};

}  // namespace blowlab
