// Shared error types, version tag, and numeric formatting.
#pragma once

#include <charconv>
#include <stdexcept>
#include <string>

namespace irg {

inline constexpr const char* kVersion = "0.1.0";

// Shortest decimal string that parses back to the same double.
inline std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Misuse of an API contract, bad input, or bad configuration. The CLI maps
// this to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A numeric routine could not deliver (no bracket, no convergence, infeasible
// calibration, caps exceeded where no fallback exists). CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace irg
