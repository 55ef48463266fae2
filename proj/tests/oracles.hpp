#pragma once

// Independent reference computations used by the tests. These deliberately
// avoid the library's own quadrature/interpolation paths.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracles {

/// Positive root of r^3 + r - 2m by plain bisection in long double.
inline long double cubic_horizon_radius(long double m) {
  long double lo = 0.0L, hi = 1.0L;
  while (hi * hi * hi + hi < 2.0L * m) hi *= 2.0L;
  for (int i = 0; i < 200; ++i) {
    long double mid = 0.5L * (lo + hi);
    (mid * mid * mid + mid < 2.0L * m ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

/// Adaptive Simpson in long double.
inline long double simpson(const std::function<long double(long double)>& f, long double a,
                           long double b, long double tol, int depth = 0) {
  const long double c = 0.5L * (a + b);
  const long double fa = f(a), fb = f(b), fc = f(c);
  const long double whole = (b - a) / 6.0L * (fa + 4.0L * fc + fb);
  const long double l = (c - a) / 6.0L * (fa + 4.0L * f(0.5L * (a + c)) + fc);
  const long double r = (b - c) / 6.0L * (fc + 4.0L * f(0.5L * (c + b)) + fb);
  if (depth > 60 || std::abs(l + r - whole) < 15.0L * tol) return l + r + (l + r - whole) / 15.0L;
  return simpson(f, a, c, tol / 2, depth + 1) + simpson(f, c, b, tol / 2, depth + 1);
}

/// Psi(r) = int_r^inf ds/(s sqrt(1+s^2-2m/s)) via the substitutions
/// s = r_h + u^2 (throat) and s = 1/t (tail), adaptive Simpson, long double.
inline long double slice_psi(long double m, long double r) {
  const long double rh = cubic_horizon_radius(m);
  auto q = [=](long double s) { return s + rh + 2.0L * m / (s * rh); };
  const long double split = std::max({2.0L * rh, 4.0L * m, 2.0L, r});
  long double total = 0.0L;
  if (r < split) {
    total += simpson([=](long double u) { const long double s = rh + u * u;
                                          return 2.0L / (s * std::sqrt(q(s))); },
                     std::sqrt(std::max(0.0L, r - rh)), std::sqrt(split - rh), 1e-17L);
  }
  total += simpson([=](long double t) { return 1.0L / std::sqrt(1.0L + t * t - 2.0L * m * t * t * t); },
                   0.0L, 1.0L / split, 1e-17L);
  return total;
}

/// Mean curvature of the r-sphere in the AdS-Schwarzschild slice.
inline long double ads_H_of_r(long double m, long double r) {
  return 2.0L / r * std::sqrt(1.0L + r * r - 2.0L * m / r);
}

/// Hyperbolic radius of the r-sphere on the exterior branch.
inline long double ads_rho_of_r(long double m, long double r) {
  return 2.0L * std::atanh(std::exp(-slice_psi(m, r)));
}

/// First-variation-of-area mean curvature for a radial conformal factor:
/// H = d/ds ln Area(rho), ds = w^2 drho, Area = 4 pi w^4 sinh^2 rho,
/// by centered differences on ln Area.
inline double first_variation_H(const std::function<double(double)>& w, double rho, double h) {
  auto log_area = [&](double r) { return 4.0 * std::log(w(r)) + 2.0 * std::log(std::sinh(r)); };
  const double dlnA = (log_area(rho + h) - log_area(rho - h)) / (2.0 * h);
  return dlnA / (w(rho) * w(rho));
}

/// Least-squares slope of y vs x.
inline double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("lsq_slope");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = double(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace oracles
