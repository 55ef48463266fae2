#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ahm/hypgeom.hpp"

using namespace ahm;

namespace {

HPoint random_ball_point(std::mt19937& rng, double rmax = 0.95) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    HPoint p = HPoint::ball(rmax * u(rng), rmax * u(rng), rmax * u(rng));
    const double n = p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2];
    if (n < rmax * rmax) return p;
  }
}

}  // namespace

TEST_CASE("distance closed forms") {
  const HPoint o = base_point(Model::Ball);
  CHECK(dist(o, o) == 0.0);

  // vertical geodesic in the half-space model: rho = ln y
  const HPoint a = HPoint::half_space(0, 0, 1);
  const HPoint b = HPoint::half_space(0, 0, std::exp(1.0));
  CHECK(dist(a, b) == doctest::Approx(1.0).epsilon(1e-14));
  // cross-check cosh rho = 1 + (e-1)^2 / (2e)
  const double ch = 1.0 + (std::exp(1.0) - 1.0) * (std::exp(1.0) - 1.0) / (2.0 * std::exp(1.0));
  CHECK(std::cosh(dist(a, b)) == doctest::Approx(ch).epsilon(1e-14));

  // ball model: arccosh(5/3) = ln 3
  CHECK(dist(o, HPoint::ball(0.5, 0, 0)) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
}

TEST_CASE("distance axioms") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    const HPoint a = random_ball_point(rng), b = random_ball_point(rng), c = random_ball_point(rng);
    const double dab = dist(a, b), dba = dist(b, a);
    CHECK(dab == doctest::Approx(dba).epsilon(1e-13));
    CHECK(dab >= 0.0);
    CHECK(dist(a, c) <= dab + dist(b, c) + 1e-12);
  }
}

TEST_CASE("model conversion") {
  // base point convention
  const HPoint h = convert(base_point(Model::Ball), Model::HalfSpace);
  CHECK(h.x[0] == doctest::Approx(0.0));
  CHECK(h.x[1] == doctest::Approx(0.0));
  CHECK(h.x[2] == doctest::Approx(1.0));

  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    const HPoint p = random_ball_point(rng);
    const HPoint back = convert(convert(p, Model::HalfSpace), Model::Ball);
    for (int k = 0; k < 3; ++k) CHECK(back.x[k] == doctest::Approx(p.x[k]).epsilon(1e-12));

    const HPoint q = random_ball_point(rng);
    const double d_ball = dist(p, q);
    const double d_half = dist(convert(p, Model::HalfSpace), convert(q, Model::HalfSpace));
    CHECK(d_ball == doctest::Approx(d_half).epsilon(1e-12));
  }

  CHECK_THROWS_AS(convert(HPoint::ball(1.2, 0, 0), Model::HalfSpace), std::domain_error);
  CHECK_THROWS_AS((void)dist(HPoint::half_space(0, 0, -1), base_point(Model::HalfSpace)),
                  std::domain_error);
}

TEST_CASE("hyperbolic translation") {
  // trivial case: base point maps to identity
  CHECK(translate_to(base_point(Model::HalfSpace)).kind == Isometry::Kind::Identity);

  // F(x, y) = (x_p + y_p x, y_p y) maps (0,1) to (x_p, y_p)
  const HPoint p = HPoint::half_space(0.7, -0.3, 2.5);
  const Isometry f = translate_to(p);
  const HPoint fo = f.apply(base_point(Model::HalfSpace));
  CHECK(fo.x[0] == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(fo.x[1] == doctest::Approx(-0.3).epsilon(1e-14));
  CHECK(fo.x[2] == doctest::Approx(2.5).epsilon(1e-14));

  // distance preservation on random pairs
  std::mt19937 rng(13);
  double worst = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const HPoint a = random_ball_point(rng), b = random_ball_point(rng);
    const double before = dist(a, b);
    const double after = dist(f.apply(a), f.apply(b));
    worst = std::max(worst, std::abs(after - before));
  }
  CHECK(worst < 1e-12);

  // composition with the inverse is the identity
  const Isometry finv = f.inverse();
  for (int i = 0; i < 100; ++i) {
    const HPoint a = random_ball_point(rng);
    const HPoint back = finv.apply(f.apply(a));
    CHECK(dist(back, a) < 1e-12);
  }
}

TEST_CASE("polar chart round trips") {
  const PolarChart chart{base_point(Model::Ball), {0, 0, 1}};

  // rho = 0 maps to the center for any theta
  for (double th : {0.0, 1.0, 3.0})
    CHECK(dist(polar_to_point(chart, 0.0, th), chart.center) < 1e-14);

  // a point on the axis has theta in {0, pi}
  const HPoint on_axis = polar_to_point(chart, 1.3, 0.0);
  const auto [r_ax, th_ax] = point_to_polar(chart, on_axis);
  CHECK(r_ax == doctest::Approx(1.3).epsilon(1e-12));
  CHECK(th_ax == doctest::Approx(0.0).epsilon(1e-9));

  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ur(0.01, 4.0), ut(0.05, 3.09);
  for (int i = 0; i < 300; ++i) {
    const double rho = ur(rng), th = ut(rng);
    const HPoint q = polar_to_point(chart, rho, th);
    const auto [r2, t2] = point_to_polar(chart, q);
    CHECK(r2 == doctest::Approx(rho).epsilon(1e-11));
    CHECK(t2 == doctest::Approx(th).epsilon(1e-11));
    // rho returned equals dist(center, q)
    CHECK(std::abs(r2 - dist(chart.center, q)) < 1e-12);
  }

  // off-center chart on the common axis
  const PolarChart chart2{HPoint::half_space(0, 0, std::exp(1.5)), {0, 0, 1}};
  for (int i = 0; i < 100; ++i) {
    const double rho = ur(rng), th = ut(rng);
    const HPoint q = polar_to_point(chart2, rho, th);
    const auto [r2, t2] = point_to_polar(chart2, q);
    CHECK(r2 == doctest::Approx(rho).epsilon(1e-11));
    CHECK(t2 == doctest::Approx(th).epsilon(1e-10));
  }
}

TEST_CASE("axis geometry closed forms") {
  const PolarChart base{base_point(Model::Ball), {0, 0, 1}};
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> us(-3.0, 3.0), ur(0.05, 5.0), ut(0.05, 3.09);

  for (int i = 0; i < 300; ++i) {
    const double s = us(rng), rho = ur(rng), th = ut(rng);
    const HPoint x = polar_to_point(base, rho, th);
    const HPoint c = translate_axis(s).apply(base_point(Model::HalfSpace));
    CHECK(axis_dist(s, rho, th) == doctest::Approx(dist(c, x)).epsilon(1e-11));
  }

  // partial derivatives against centered differences
  for (int i = 0; i < 100; ++i) {
    const double s = us(rng), rho = ur(rng), th = ut(rng);
    const auto d = axis_dist_derivs(s, rho, th);
    const double h = 1e-6;
    const double fd_rho = (axis_dist(s, rho + h, th) - axis_dist(s, rho - h, th)) / (2 * h);
    const double fd_th = (axis_dist(s, rho, th + h) - axis_dist(s, rho, th - h)) / (2 * h);
    CHECK(d.d_rho == doctest::Approx(fd_rho).epsilon(1e-6));
    CHECK(d.d_theta == doctest::Approx(fd_th).epsilon(1e-6));
  }

  // from_axis_polar inverts axis_dist geometry
  for (int i = 0; i < 200; ++i) {
    const double s = us(rng), r = ur(rng) * 0.5, om = ut(rng);
    const auto [rho, th] = from_axis_polar(s, r, om);
    CHECK(axis_dist(s, rho, th) == doctest::Approx(r).epsilon(1e-10));
  }

  // gradient angle: cos of the angle between the two radial directions,
  // checked against the coordinate computation
  for (int i = 0; i < 100; ++i) {
    const double s1 = us(rng), s2 = us(rng), rho = ur(rng), th = ut(rng);
    if (std::abs(s1 - s2) < 0.1) continue;
    const HPoint x = polar_to_point(base, rho, th);
    const HPoint c1 = translate_axis(s1).apply(base_point(Model::HalfSpace));
    const HPoint c2 = translate_axis(s2).apply(base_point(Model::HalfSpace));
    // directions to the centers in the ball frame at x
    const Isometry to_base = translate_to(x).inverse();
    const HPoint u1 = convert(to_base.apply(c1), Model::Ball);
    const HPoint u2 = convert(to_base.apply(c2), Model::Ball);
    double dot = 0, n1 = 0, n2 = 0;
    for (int k = 0; k < 3; ++k) {
      dot += u1.x[k] * u2.x[k];
      n1 += u1.x[k] * u1.x[k];
      n2 += u2.x[k] * u2.x[k];
    }
    const double expected = dot / std::sqrt(n1 * n2);
    CHECK(grad_dist_cos_angle(s1, s2, rho, th) == doctest::Approx(expected).epsilon(1e-9));
  }
}
