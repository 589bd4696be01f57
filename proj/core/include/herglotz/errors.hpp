#pragma once

#include <stdexcept>
#include <string>

namespace herglotz {

/// Input outside an operation's mathematical domain (non-unit vector,
/// unsupported order, basis/dimension mismatch, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A truncated series ran out of budget before meeting its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double partial_value, int terms)
      : std::runtime_error(what), partial_value_(partial_value), terms_(terms) {}

  double partial_value() const noexcept { return partial_value_; }
  int terms() const noexcept { return terms_; }

 private:
  double partial_value_;
  int terms_;
};

/// Linear system without a unique solution.
class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Magnitude data that no field reproduces within tolerance.
class InconsistentDataError : public std::runtime_error {
 public:
  InconsistentDataError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// A retrieval branch whose hypothesis the data does not satisfy.
class BranchNotApplicableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input file; line is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}

  int line() const noexcept { return line_; }

 private:
  int line_;
};

}  // namespace herglotz
