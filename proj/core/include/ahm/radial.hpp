#pragma once

#include <string>
#include <vector>

#include "ahm/util.hpp"

namespace ahm {

/// Parameters of the seed family: AdS-Schwarzschild mass, core-cap depth,
/// optional multiplicative dip, and the support radius used for placement
/// bookkeeping.
struct SeedParams {
  double m = 0.0;         // mass parameter, >= 0
  double cap_depth = 0.0; // in [0,1); >0 continues through the throat before capping
  double dip_amp = 0.0;
  double dip_lo = 0.0, dip_hi = 0.0;
  double delta = 0.0;     // support radius (input, verified post hoc)
};

/// Spherically symmetric conformal factor w(rho) sampled with two derivatives
/// on an increasing knot grid; C2 piecewise-quintic between knots, fitted
/// 1 + A e^{-3 rho} tail beyond the last knot.
struct RadialProfile {
  std::vector<double> knots;
  std::vector<double> w, dw, d2w;
  double decay_amplitude = 0.0;  // A
  double support_radius = 0.0;   // delta
  double core_radius = 0.0;      // R = -6 holds to quadrature accuracy outside [0, core_radius)
  bool complete = false;         // domain starts at rho = 0 with w'(0) = 0
  SeedParams params;

  double rho_min() const { return knots.empty() ? 0.0 : knots.front(); }
  double rho_max() const { return knots.empty() ? 0.0 : knots.back(); }
};

struct RadialEval {
  double w, dw, d2w;
};

/// C2 evaluation; exact at knots; tail extrapolation beyond rho_max.
RadialEval eval(const RadialProfile& p, double rho);

/// Hyperbolic radial Laplacian w'' + 2 coth(rho) w'; series-regularized at 0.
double laplacian_radial(const RadialProfile& p, double rho);

/// Scalar curvature of w^4 * (hyperbolic metric) for a radial factor.
double scalar_curvature_radial(const RadialProfile& p, double rho);

/// Mean curvature of the geodesic sphere of radius rho, outward normal:
/// H = 2 coth(rho) / w^2 + 4 w' / w^3.
double mean_curvature_radial(const RadialProfile& p, double rho);

/// Least-squares fit of ln|w-1| vs rho over [lo, hi] using knots in range.
LineFit decay_fit(const RadialProfile& p, double lo, double hi);

/// Columnar text serialization (rho w w' w'' at 17 significant digits) with a
/// SeedParams header; bit-exact round-trip at the printed precision.
void save_profile(const std::string& path, const RadialProfile& p);
RadialProfile load_profile(const std::string& path);

}  // namespace ahm
