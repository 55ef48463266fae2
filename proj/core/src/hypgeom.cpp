#include "ahm/hypgeom.hpp"

#include <cmath>
#include <stdexcept>

#include "ahm/util.hpp"

namespace ahm {

namespace {

double norm2(const std::array<double, 3>& v) {
  return v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
}

std::array<double, 3> sub(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

void check_valid(const HPoint& p, const char* who) {
  if (!point_valid(p)) throw std::domain_error(std::string(who) + ": point outside model domain");
}

}  // namespace

HPoint base_point(Model m) {
  return m == Model::Ball ? HPoint::ball(0, 0, 0) : HPoint::half_space(0, 0, 1);
}

bool point_valid(const HPoint& p) {
  for (double c : p.x)
    if (!std::isfinite(c)) return false;
  if (p.model == Model::Ball) return norm2(p.x) < 1.0;
  return p.x[2] > 0.0;
}

HPoint convert(const HPoint& p, Model target) {
  check_valid(p, "convert");
  if (p.model == target) return p;
  const double a = p.x[0], b = p.x[1], c = p.x[2];
  if (p.model == Model::Ball) {
    // ball -> upper half-space; ball origin -> (0,0,1), north pole -> infinity
    const double d = a * a + b * b + sq(1.0 - c);
    return HPoint::half_space(2.0 * a / d, 2.0 * b / d, (1.0 - norm2(p.x)) / d);
  }
  const double d = a * a + b * b + sq(c + 1.0);
  return {{2.0 * a / d, 2.0 * b / d, (norm2(p.x) - 1.0) / d}, Model::Ball};
}

double dist(const HPoint& a, const HPoint& b) {
  check_valid(a, "dist");
  check_valid(b, "dist");
  const HPoint bb = (a.model == b.model) ? b : convert(b, a.model);
  if (a.model == Model::Ball) {
    const double q = 2.0 * norm2(sub(a.x, bb.x)) / ((1.0 - norm2(a.x)) * (1.0 - norm2(bb.x)));
    return acosh_safe(1.0 + q);
  }
  const double q = norm2(sub(a.x, bb.x)) / (2.0 * a.x[2] * bb.x[2]);
  return acosh_safe(1.0 + q);
}

HPoint Isometry::apply(const HPoint& q) const {
  check_valid(q, "Isometry::apply");
  if (kind == Kind::Identity) return q;
  const HPoint h = convert(q, Model::HalfSpace);
  const HPoint r = HPoint::half_space(x_p[0] + y_p * h.x[0], x_p[1] + y_p * h.x[1], y_p * h.x[2]);
  return q.model == Model::HalfSpace ? r : convert(r, q.model);
}

Isometry Isometry::inverse() const {
  if (kind == Kind::Identity) return {};
  Isometry inv;
  inv.kind = Kind::HalfSpaceTranslation;
  inv.y_p = 1.0 / y_p;
  inv.x_p = {-x_p[0] / y_p, -x_p[1] / y_p};
  return inv;
}

Isometry translate_to(const HPoint& p) {
  const HPoint h = convert(p, Model::HalfSpace);
  if (h.x[0] == 0.0 && h.x[1] == 0.0 && h.x[2] == 1.0) return {};
  Isometry f;
  f.kind = Isometry::Kind::HalfSpaceTranslation;
  f.x_p = {h.x[0], h.x[1]};
  f.y_p = h.x[2];
  return f;
}

Isometry translate_axis(double s) {
  if (s == 0.0) return {};
  Isometry f;
  f.kind = Isometry::Kind::HalfSpaceTranslation;
  f.y_p = std::exp(s);
  return f;
}

namespace {

// Deterministic unit vector perpendicular to a (meridian convention).
std::array<double, 3> perp_of(const std::array<double, 3>& a) {
  std::array<double, 3> ref = (std::abs(a[0]) < 0.9) ? std::array<double, 3>{1, 0, 0}
                                                     : std::array<double, 3>{0, 0, 1};
  const double d = ref[0] * a[0] + ref[1] * a[1] + ref[2] * a[2];
  std::array<double, 3> e{ref[0] - d * a[0], ref[1] - d * a[1], ref[2] - d * a[2]};
  const double n = std::sqrt(norm2(e));
  if (n == 0.0) throw std::invalid_argument("PolarChart: axis not a unit vector");
  return {e[0] / n, e[1] / n, e[2] / n};
}

}  // namespace

HPoint polar_to_point(const PolarChart& chart, double rho, double theta) {
  if (rho < 0.0) throw std::domain_error("polar_to_point: rho < 0");
  const Isometry t = translate_to(chart.center);
  if (rho == 0.0) return t.apply(base_point(Model::HalfSpace));
  const auto e = perp_of(chart.axis);
  const double r = std::tanh(0.5 * rho);
  const double ca = r * std::cos(theta), sa = r * std::sin(theta);
  const HPoint u = HPoint::ball(ca * chart.axis[0] + sa * e[0], ca * chart.axis[1] + sa * e[1],
                                ca * chart.axis[2] + sa * e[2]);
  return t.apply(convert(u, Model::HalfSpace));
}

std::pair<double, double> point_to_polar(const PolarChart& chart, const HPoint& q) {
  const double rho = dist(chart.center, q);
  if (rho == 0.0) return {0.0, 0.0};
  const HPoint u = convert(translate_to(chart.center).inverse().apply(q), Model::Ball);
  const double n = std::sqrt(norm2(u.x));
  const double along = (u.x[0] * chart.axis[0] + u.x[1] * chart.axis[1] + u.x[2] * chart.axis[2]) / n;
  const double c = std::min(1.0, std::max(-1.0, along));
  return {rho, std::acos(c)};
}

double axis_dist(double s, double rho, double theta) {
  const double ch = std::cosh(s) * std::cosh(rho) - std::sinh(s) * std::sinh(rho) * std::cos(theta);
  return acosh_safe(ch);
}

AxisDistDerivs axis_dist_derivs(double s, double rho, double theta) {
  AxisDistDerivs d;
  d.value = axis_dist(s, rho, theta);
  const double sh = std::sinh(d.value);
  if (sh == 0.0) throw std::domain_error("axis_dist_derivs: field point at the center");
  d.d_rho = (std::cosh(s) * std::sinh(rho) - std::sinh(s) * std::cosh(rho) * std::cos(theta)) / sh;
  d.d_theta = std::sinh(s) * std::sinh(rho) * std::sin(theta) / sh;
  return d;
}

std::pair<double, double> from_axis_polar(double s, double r, double omega) {
  if (s == 0.0) return {r, omega};
  const double ch = std::cosh(s) * std::cosh(r) + std::sinh(s) * std::sinh(r) * std::cos(omega);
  const double rho = acosh_safe(ch);
  if (rho == 0.0) return {0.0, 0.0};
  double c = (std::cosh(s) * std::cosh(rho) - std::cosh(r)) / (std::sinh(s) * std::sinh(rho));
  c = std::min(1.0, std::max(-1.0, c));
  return {rho, std::acos(c)};
}

double grad_dist_cos_angle(double s1, double s2, double rho, double theta) {
  const double r1 = axis_dist(s1, rho, theta);
  const double r2 = axis_dist(s2, rho, theta);
  if (r1 == 0.0 || r2 == 0.0) throw std::domain_error("grad_dist_cos_angle: point at a center");
  const double d12 = std::abs(s1 - s2);
  double c = (std::cosh(r1) * std::cosh(r2) - std::cosh(d12)) / (std::sinh(r1) * std::sinh(r2));
  return std::min(1.0, std::max(-1.0, c));
}

}  // namespace ahm
