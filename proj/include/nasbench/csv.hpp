#pragma once

#include <cmath>
#include <cstdio>
#include <string>

namespace nasbench {

/// Locale-independent fixed formatting used by every CSV writer: up to 10
/// significant digits, "nan" for NaN.
inline std::string format_real(double x) {
  if (std::isnan(x)) return "nan";
  if (x == 0.0) return "0";  // folds -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace nasbench
