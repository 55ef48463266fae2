#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace ahm {

inline double sq(double x) { return x * x; }

/// arccosh with the argument clamped to >= 1 against roundoff.
inline double acosh_safe(double x) { return std::acosh(x < 1.0 ? 1.0 : x); }

/// Quintic smoothstep s(t) = 6t^5 - 15t^4 + 10t^3 on [0,1], clamped outside.
inline double smoothstep5(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return ((6.0 * t - 15.0) * t + 10.0) * t * t * t;
}
inline double smoothstep5_d1(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return ((30.0 * t - 60.0) * t + 30.0) * t * t;
}
inline double smoothstep5_d2(double t) {
  if (t <= 0.0 || t >= 1.0) return 0.0;
  return ((120.0 * t - 180.0) * t + 60.0) * t;
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // rms of fit residuals
};

/// Least-squares line y = intercept + slope*x.
inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 samples");
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("fit_line: degenerate abscissae");
  LineFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy - f.slope * sx) / n;
  double ss = 0;
  for (size_t i = 0; i < n; ++i) ss += sq(y[i] - f.intercept - f.slope * x[i]);
  f.residual = std::sqrt(ss / n);
  return f;
}

/// 17-significant-digit text form; round-trips bit-exactly through strtod.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Errors that map to CLI exit code 4.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Errors that map to CLI exit code 3.
struct SolveError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ahm
