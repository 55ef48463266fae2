#pragma once

#include <vector>

#include "ahm/radial.hpp"

namespace ahm::seed {

/// Structural radii of the AdS-Schwarzschild static slice in the conformal
/// radial gauge ln tanh(rho/2) = -Psi(r), Psi(r) = int_r^inf ds/(s sqrt(f)),
/// f(s) = 1 + s^2 - 2m/s.
struct BridgeInfo {
  double r_h;           // positive root of r^3 + r - 2m
  double psi_h;         // Psi(r_h)
  double rho_h;         // radius of the minimal sphere (H = 0)
  double rho_puncture;  // inner end in the conformal gauge
  double rho_minus;     // H = -2 sphere (r = 2m, inner branch)
  double rho_plus;      // H = +2 sphere (r = 2m, outer branch)
};

BridgeInfo bridge_info(double m);

/// Psi(r) for r >= r_h; throat handled by exact factorization
/// f(s) = (s - r_h)(s + r_h + 2m/(s r_h)).
double psi(double m, double r);

/// w == 1 on [0, rho_max].
RadialProfile trivial_profile(double rho_max);

/// Exterior conformal factor w = sqrt(r / sinh rho) on [rho_h, rho_max].
RadialProfile ads_schw_profile(double m, double rho_max);

/// Completes an exterior profile to [0, rho_max]: for cap_depth > 0 continues
/// the exact slice through the throat down to
/// rho_core = rho_puncture + (1 - cap_depth)(rho_minus - rho_puncture),
/// then closes with an even degree-6 polynomial core cap (C3 join, w'(0)=0);
/// cap_depth = 0 attaches the polynomial cap directly at rho_h.
/// Afterwards multiplies by the compactly supported C2 dip
/// 1 - dip_amp * bump((rho - lo)/(hi - lo)) when dip_amp > 0.
RadialProfile cap_and_dip(const RadialProfile& ext, const SeedParams& params);

/// m == 0 -> trivial (+ optional dip); otherwise cap_and_dip(ads_schw_profile).
RadialProfile build_seed(const SeedParams& params, double rho_max);

/// All crossings of the radial mean-curvature profile H(rho) = target in
/// [lo, hi], by dense scan plus bisection.
std::vector<double> cmc_crossings(const RadialProfile& p, double target, double lo, double hi);

}  // namespace ahm::seed
