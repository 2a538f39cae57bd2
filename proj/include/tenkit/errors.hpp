#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tenkit {

/// Invalid caller input: bad permutation, dimension mismatch, bad flag value.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed tensor text. Carries the 1-based line number when known.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& detail, std::size_t line, const std::string& source = "")
      : std::runtime_error((source.empty() ? "line " : source + ":") + std::to_string(line) +
                           ": " + detail),
        detail_(detail),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
  std::size_t line_;
};

/// Request would exceed a configured memory ceiling.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf produced during an iterative solve.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, std::size_t iteration)
      : std::runtime_error(what + " (iteration " + std::to_string(iteration) + ")"),
        iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

}  // namespace tenkit
