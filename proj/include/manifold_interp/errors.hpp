#pragma once

#include <stdexcept>
#include <string>

namespace minterp {

// NaN or Inf reached a numeric entry point.
struct NonFiniteInput : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct LengthMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Not enough known samples around a lost point to fit weights.
struct InsufficientHistory : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Query outside the knot range of a method that cannot extrapolate.
struct ExtrapolationUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSystem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, long line_number)
      : std::runtime_error(msg + " (line " + std::to_string(line_number) + ")"),
        line(line_number) {}
  long line;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace minterp
