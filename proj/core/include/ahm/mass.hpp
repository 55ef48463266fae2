#pragma once

#include <array>
#include <vector>

#include "ahm/grid.hpp"
#include "ahm/radial.hpp"

namespace ahm {

/// Per-direction amplitude of the e^{-3 rho} tail.
struct AspectFit {
  std::vector<double> theta;      // direction samples (grid theta rows)
  std::vector<double> amplitude;  // A(omega): slope-pinned fit, e^{3 rho}(w-1)
  std::vector<double> slope;      // free-slope fit per direction
  std::vector<double> window_lo, window_hi;  // per-direction windows
  double max_fit_residual = 0.0;  // rms of the free fit, worst direction
  bool degenerate = false;        // |w - 1| below the floor everywhere -> A = 0
};

/// Fit of ln|w-1| vs rho along every grid direction. Windows adapt per
/// direction: they start where the tail drops below cap_value and end before
/// the signal reaches noise_floor (and at least margin below the grid edge).
/// min_rho restricts the windows to the genuine far field (beyond all seed
/// and annulus structure) for slope verification.
AspectFit fit_aspect(const ConformalField& w, double noise_floor = 1e-12,
                     double cap_value = 1e-3, double edge_margin = 3.0, double min_rho = 0.0);

/// Radial overload used for calibration.
struct RadialAspect {
  double amplitude = 0.0;
  double slope = 0.0;
  bool degenerate = false;
};
RadialAspect fit_aspect_radial(const RadialProfile& p, double noise_floor = 1e-13,
                               double cap_value = 1e-3);

struct MassReport {
  double mass = 0.0;
  double monopole = 0.0;                  // integral of tr h over S^2
  std::array<double, 3> dipole{0, 0, 0};  // axisymmetric: only z nonzero
  double c_cal = 0.0;
  bool radicand_negative = false;
  bool degenerate = false;
  double aspect_asymmetry = 0.0;  // max |A(w) - A(reflected w)|
};

/// Mass from the fitted aspect: tr h = c_cal * A(omega), quadrature over the
/// sphere, M = (1/16 pi) sqrt(monopole^2 - |dipole|^2).
MassReport asymptotic_mass(const AspectFit& fit, double c_cal);

/// Calibration: c_cal such that the exact unit-mass profile reports mass 1.
double calibrate(double rho_max = 14.0);

}  // namespace ahm
