#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dqls {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Bad input: malformed values, shape mismatches, out-of-range parameters.
class ValidationError : public Error {
  public:
    using Error::Error;
};

class IndexError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

/// Malformed record in a text input; carries the 1-based line number.
class ParseError : public ValidationError {
  public:
    ParseError(std::size_t line, const std::string &what);
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

/// Solver parameters that cannot be honoured (e.g. a rotation amplitude above one).
class ConfigurationError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

/// Input is well formed but mathematically degenerate (zero row, zero matrix, ...).
class DegenerateError : public Error {
  public:
    using Error::Error;
};

class SingularMatrixError : public DegenerateError {
  public:
    using DegenerateError::DegenerateError;
};

/// Requested simulation exceeds the configured memory guard.
class ResourceError : public Error {
  public:
    using Error::Error;
};

/// Internal consistency check failed; indicates a bug rather than bad input.
class StructuralMismatchError : public Error {
  public:
    using Error::Error;
};

/// Process exit code for the command-line front end.
int exit_code_for(const std::exception &e) noexcept;

} // namespace dqls
