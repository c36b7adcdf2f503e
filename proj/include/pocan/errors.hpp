#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pocan {

/// Malformed model or automaton text. Carries a 1-based source position.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                             ": " + what),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Well-formed input that violates a model invariant (distribution sums, totality, ...).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested accuracy cannot be delivered by the numeric backends.
class PrecisionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iterative method hit its iteration cap.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A caller bug or a broken internal invariant.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace pocan
