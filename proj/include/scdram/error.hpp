#pragma once

#include <stdexcept>
#include <string>

namespace scdram {

/// Base for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operands of one arithmetic operation disagree on bit length, or a length
/// is incompatible with the encoding width.
class LengthMismatch : public Error {
 public:
  using Error::Error;
};

/// An argument is outside the operation's domain.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A modeled hardware precondition does not hold (e.g. Row 3 not zeroed).
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// A configuration or network description failed validation.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text; carries the 1-based line number when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace scdram
