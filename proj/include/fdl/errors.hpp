#pragma once

#include <stdexcept>
#include <string>

namespace fdl {

// Invalid inputs (caller bugs or bad config values).
struct ZeroVector : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonpositiveRadius : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonpositiveTime : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NonpositiveSpacing : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadPadding : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct OutOfRegime : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct ShapeMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BumpTouchesBoundary : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct BadNormSpec : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Runtime failures.
struct StepTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct AllCensored : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NonConvergence : std::runtime_error {
  int iterations;
  double residual;
  NonConvergence(int it, double res)
      : std::runtime_error("nonlinear solve did not converge after " + std::to_string(it) +
                           " iterations, residual " + std::to_string(res)),
        iterations(it),
        residual(res) {}
};

// Config front end.
struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_no, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};
struct ValidationError : std::runtime_error {
  std::string key;
  ValidationError(const std::string& k, const std::string& reason)
      : std::runtime_error(k + ": " + reason), key(k) {}
};

}  // namespace fdl
