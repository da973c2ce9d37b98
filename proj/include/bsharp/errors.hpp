#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bsharp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input data (invalid level sequence, inconsistent tableau shape).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside of its domain (e.g. symmetry of the empty tree).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Preconditions of a binary operation were violated (order mismatch, wrong series kind).
class ContractError : public Error {
 public:
  using Error::Error;
};

/// Division by zero and related exact-arithmetic failures.
class ArithmeticError : public Error {
 public:
  using Error::Error;
};

/// Floating point failure in the integration harness.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double last_valid_time)
      : Error(what), last_valid_time_(last_valid_time) {}
  double last_valid_time() const noexcept { return last_valid_time_; }

 private:
  double last_valid_time_;
};

/// Syntax error in a textual input; line and column are 1-based.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column)
      : Error(format(message, line, column)),
        message_(message),
        line_(line),
        column_(column) {}

  const std::string& message() const noexcept { return message_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line,
                            std::size_t column) {
    return "parse error at " + std::to_string(line) + ":" +
           std::to_string(column) + ": " + message;
  }

  std::string message_;
  std::size_t line_;
  std::size_t column_;
};

}  // namespace bsharp
