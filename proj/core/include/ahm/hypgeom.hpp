#pragma once

#include <array>
#include <utility>

namespace ahm {

enum class Model { Ball, HalfSpace };

/// A point of hyperbolic 3-space tagged with its coordinate model.
/// Ball model: |x| < 1.  Half-space model: x[2] > 0.
struct HPoint {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  Model model = Model::Ball;

  static HPoint ball(double a, double b, double c) { return {{a, b, c}, Model::Ball}; }
  static HPoint half_space(double a, double b, double y) {
    return {{a, b, y}, Model::HalfSpace};
  }
};

/// Base point convention: ball origin <-> half-space (0,0,1).
HPoint base_point(Model m);

bool point_valid(const HPoint& p);

/// Model conversion (Cayley-type map); preserves distances, round-trip identity.
HPoint convert(const HPoint& p, Model target);

/// Hyperbolic distance; mixed models allowed (converted internally).
double dist(const HPoint& a, const HPoint& b);

/// Hyperbolic translation along the axes of the half-space model:
/// (x, y) -> (x_p + y_p x, y_p y).  Identity when trivial.
struct Isometry {
  enum class Kind { Identity, HalfSpaceTranslation };
  Kind kind = Kind::Identity;
  std::array<double, 2> x_p{0.0, 0.0};
  double y_p = 1.0;

  HPoint apply(const HPoint& q) const;
  Isometry inverse() const;
};

/// The translation mapping the base point o to p.
Isometry translate_to(const HPoint& p);

/// Translation by signed arclength s along the vertical axis through o
/// (ball z-axis).  translate_axis(s).apply(o) is at distance |s| from o.
Isometry translate_axis(double s);

/// Geodesic polar chart: coordinates (rho >= 0, theta in [0, pi]) in the
/// meridian plane spanned by the axis and a fixed perpendicular direction.
struct PolarChart {
  HPoint center;
  std::array<double, 3> axis{0.0, 0.0, 1.0};  // unit vector, ball-model frame at the center
};

HPoint polar_to_point(const PolarChart& chart, double rho, double theta);
std::pair<double, double> point_to_polar(const PolarChart& chart, const HPoint& q);

// ---------------------------------------------------------------------------
// Closed-form geometry for collinear configurations. All charts share the
// vertical axis; an axis point is identified by its signed arclength s from
// the chart base point. A field point is (rho, theta) in the base chart.
// These forms stay accurate at separations where coordinate models lose
// precision.
// ---------------------------------------------------------------------------

/// Distance from the axis point at arclength s to the field point (rho, theta).
double axis_dist(double s, double rho, double theta);

/// Partials of axis_dist with respect to rho and theta. Requires the result
/// distance > 0.
struct AxisDistDerivs {
  double value;    // rho_s(x)
  double d_rho;    // d rho_s / d rho
  double d_theta;  // d rho_s / d theta
};
AxisDistDerivs axis_dist_derivs(double s, double rho, double theta);

/// Base-chart coordinates of the point at distance r, angle omega (measured
/// from the +axis direction) from the axis point at arclength s.
std::pair<double, double> from_axis_polar(double s, double r, double omega);

/// cos of the angle at the field point between the radial directions from two
/// axis centers at arclengths s1, s2 (gradients of the two distance functions).
double grad_dist_cos_angle(double s1, double s2, double rho, double theta);

}  // namespace ahm
