#pragma once

#include <vector>

#include "ahm/curvature.hpp"
#include "ahm/glue.hpp"

namespace ahm {

struct HorizonOptions {
  int n_omega = 64;        // angular samples per surface
  double bisect_tol = 1e-8;
  double fd_step = 1e-5;   // radial derivative step
  int scan_points = 400;
};

/// One detected CMC sphere (or an absence certificate over the scanned range).
struct CrossingRecord {
  double target = 0.0;
  bool found = false;
  std::vector<double> radii;      // rho*(omega) per direction
  double mean_radius = 0.0;
  double roundness = 0.0;         // max - min over directions
  double bracket_lo = 0.0, bracket_hi = 0.0;
  bool certified = false;         // uniform bracketing over all directions
  // absence certificate
  double scan_lo = 0.0, scan_hi = 0.0;
  double h_min = 0.0, h_max = 0.0;
};

/// H(r, omega) table over a radial range from a given axis center.
std::vector<std::vector<double>> h_profile(const FieldEvaluator& f, double s_center,
                                           const std::vector<double>& radii, int n_omega,
                                           double fd_step);

/// All crossings of H = target along each direction, clustered into surfaces;
/// the returned list holds every detected surface in increasing radius.
std::vector<CrossingRecord> find_cmc(const FieldEvaluator& f, double s_center, double target,
                                     double lo, double hi, const HorizonOptions& opt);

struct CenterReport {
  size_t center = 0;
  double delta = 0.0;
  double scan_lo = 0.0, scan_hi = 0.0;
  std::vector<CrossingRecord> minus2, zero, plus2;  // all surfaces per target
  // primary surface per target: the one inside (delta/2, delta) when present,
  // otherwise the outermost
  int primary_minus2 = -1, primary_zero = -1, primary_plus2 = -1;
  bool all_found = false;
  bool nested = false;        // rho_-2 < rho_0 < rho_+2 (primaries)
  bool placement_ok = false;  // every crossing inside B(delta)
  bool annulus_ok = false;    // primaries inside (delta/2, delta)
};

struct HorizonReport {
  std::vector<CenterReport> centers;
  bool families_disjoint = false;
  double min_family_separation = 0.0;  // hyperbolic distance between families
};

/// Detect the three target surfaces around every configured center.
/// scan ranges default to the seed profile's own radial crossings.
HorizonReport find_horizons(const FieldEvaluator& f, const GluedField& gf,
                            const HorizonOptions& opt);

struct Displacement {
  size_t center;
  double target;
  double before = 0.0, after = 0.0;
  double shift = 0.0;      // |after - before| of the primary mean radius
  bool persisted = false;  // present on both sides
};

/// Re-detects every primary surface on both fields and reports the shifts.
std::vector<Displacement> persistence(const FieldEvaluator& before, const FieldEvaluator& after,
                                      const GluedField& gf, const HorizonOptions& opt);

}  // namespace ahm
