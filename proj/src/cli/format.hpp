#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace esr::cli {

// Fixed-point with 6 decimals; negative zero prints as 0.000000.
inline std::string fixed6(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  std::string out(buf);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

inline const char* bool_text(bool value) { return value ? "true" : "false"; }

// Outcome values print as "+1", "-1", "0" (or with decimals if not integral).
inline std::string outcome_label(double value) {
  if (value == std::floor(value) && std::abs(value) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%+.0f", value);
    return value == 0.0 ? std::string("0") : std::string(buf);
  }
  return fixed6(value);
}

}  // namespace esr::cli
