#pragma once

#include <vector>

#include "ahm/grid.hpp"

namespace ahm {

/// Coefficients of the 5-point discrete hyperbolic Laplacian at an interior
/// node (axis rows use the reflected ghost; the center row uses the spherical
/// mean formula and is handled separately).
struct Stencil2D {
  double c = 0, rm = 0, rp = 0, tm = 0, tp = 0;  // center, rho-, rho+, theta-, theta+
};

Stencil2D stencil_at(const PolarGrid& g, size_t j, size_t k);

/// Discrete Delta_{H3} f on all nodes: second-order 5-point stencil,
/// reflective ghosts at theta in {0, pi}, spherical-mean formula at rho = 0,
/// one-sided second-order fallback at the outer edge.
std::vector<double> laplacian_h3(const PolarGrid& g, const std::vector<double>& f);

/// Scalar curvature of w^4 * (hyperbolic) from grid samples (stencil path).
std::vector<double> scalar_curvature_stencil(const PolarGrid& g, const std::vector<double>& w);

/// Pointwise field abstraction for mean-curvature sampling.
class FieldEvaluator {
 public:
  virtual double value(double rho, double theta) const = 0;
  virtual ~FieldEvaluator() = default;
};

/// Mean curvature (outward normal, sum convention) of the geodesic sphere of
/// radius r about the axis center at arclength s, sampled at direction angle
/// omega; the radial derivative uses centered differences with step fd_step.
double mean_curvature_sphere(const FieldEvaluator& f, double s, double r, double omega,
                             double fd_step);

}  // namespace ahm
