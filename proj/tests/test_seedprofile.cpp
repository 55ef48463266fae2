#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "ahm/radial.hpp"
#include "ahm/seed.hpp"
#include "oracles.hpp"

using namespace ahm;

TEST_CASE("quadrature cross-checks for m = 0") {
  // Psi(r) = arcsinh(1/r) exactly when m = 0 is absent from the API (m > 0),
  // so check the m -> 0 limit instead.
  const double r = 1.7;
  const double psi_small_m = seed::psi(1e-10, r);
  CHECK(psi_small_m == doctest::Approx(std::asinh(1.0 / r)).epsilon(1e-8));
}

TEST_CASE("horizon radius and structural radii, m = 1") {
  const auto b = seed::bridge_info(1.0);
  // r^3 + r - 2 = (r - 1)(r^2 + r + 2)
  CHECK(b.r_h == doctest::Approx(1.0).epsilon(1e-12));

  // independent long-double quadrature for the radii
  const double rho_h = double(2.0L * std::atanh(std::exp(-oracles::slice_psi(1.0L, 1.0L))));
  CHECK(b.rho_h == doctest::Approx(rho_h).epsilon(1e-9));
  const double rho_plus = double(oracles::ads_rho_of_r(1.0L, 2.0L));
  CHECK(b.rho_plus == doctest::Approx(rho_plus).epsilon(1e-9));

  // exact bridge identity: tanh(rho_-/2) tanh(rho_+/2) = tanh^2(rho_h/2)
  const double lhs = std::tanh(0.5 * b.rho_minus) * std::tanh(0.5 * b.rho_plus);
  const double rhs = ahm::sq(std::tanh(0.5 * b.rho_h));
  CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));

  CHECK(b.rho_puncture < b.rho_minus);
  CHECK(b.rho_minus < b.rho_h);
  CHECK(b.rho_h < b.rho_plus);
}

TEST_CASE("trivial profile is exactly hyperbolic") {
  const RadialProfile p = seed::trivial_profile(12.0);
  for (double rho : {0.0, 0.37, 2.0, 11.3}) {
    const RadialEval e = eval(p, rho);
    CHECK(e.w == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(e.dw) < 1e-14);
    CHECK(std::abs(e.d2w) < 1e-14);
  }
  CHECK(scalar_curvature_radial(p, 1.0) == doctest::Approx(-6.0).epsilon(1e-12));
}

TEST_CASE("exterior profile, m = 1") {
  const RadialProfile p = seed::ads_schw_profile(1.0, 16.0);
  const auto b = seed::bridge_info(1.0);

  // minimal sphere: H(rho_h) = 0
  CHECK(std::abs(mean_curvature_radial(p, b.rho_h + 1e-12)) < 1e-6);

  // H matches the closed form H(r) = (2/r) sqrt(1 + r^2 - 2m/r) at r = 2, 3, 5
  for (double r : {2.0, 3.0, 5.0}) {
    const double rho = double(oracles::ads_rho_of_r(1.0L, r));
    const double expected = double(oracles::ads_H_of_r(1.0L, r));
    CHECK(mean_curvature_radial(p, rho) == doctest::Approx(expected).epsilon(1e-8));
  }

  // H crosses +2 exactly at r = 2m (H^2 - 4 = (4/r^3)(r - 2m)); H > 2 after,
  // with the maximum at r = 3m, and H -> 2 from above
  const auto plus = seed::cmc_crossings(p, 2.0, b.rho_h + 1e-3, 6.0);
  REQUIRE(plus.size() == 1);
  CHECK(plus[0] == doctest::Approx(b.rho_plus).epsilon(1e-7));
  const double rho_3m = double(oracles::ads_rho_of_r(1.0L, 3.0L));
  CHECK(mean_curvature_radial(p, rho_3m) > 2.0);

  // strictly increasing H on (r_h, 3m)
  double prev = 0.0;
  for (int i = 1; i <= 40; ++i) {
    const double rho = b.rho_h + (rho_3m - b.rho_h) * i / 40.0;
    const double H = mean_curvature_radial(p, rho);
    CHECK(H > prev - 1e-12);
    prev = H;
  }

  // exact scalar curvature -6 to quadrature accuracy
  for (double rho = b.rho_h + 0.01; rho < 15.0; rho += 0.37)
    CHECK(std::abs(scalar_curvature_radial(p, rho) + 6.0) < 1e-6);

  // decay: fitted slope of ln|w-1| on [rho_h + 4, rho_h + 8] within -3 +- 0.1
  const LineFit f = decay_fit(p, b.rho_h + 4.0, b.rho_h + 8.0);
  CHECK(f.slope == doctest::Approx(-3.0).epsilon(0.034));

  // independent amplitude check at two radii via long-double quadrature
  for (double r : {40.0, 60.0}) {
    const long double rho = oracles::ads_rho_of_r(1.0L, r);
    const long double w_ref = std::sqrt((long double)r / std::sinh(rho));
    const RadialEval e = eval(p, double(rho));
    CHECK(double(w_ref - 1.0L) == doctest::Approx(e.w - 1.0).epsilon(1e-4));
  }
}

TEST_CASE("eval: C2 interpolation properties") {
  // closed-form test profile w = 1 + e^{-3 rho} on a coarse knot grid
  RadialProfile p;
  p.complete = true;
  p.decay_amplitude = 1.0;
  const double h = 0.05;
  for (double rho = 0.0; rho <= 3.0 + 1e-12; rho += h) {
    const double e3 = std::exp(-3.0 * rho);
    p.knots.push_back(rho);
    p.w.push_back(1.0 + e3);
    p.dw.push_back(-3.0 * e3);
    p.d2w.push_back(9.0 * e3);
  }
  // exact at knots
  CHECK(eval(p, p.knots[7]).w == p.w[7]);
  // midpoint error well below O(h^4)
  double worst = 0.0;
  for (size_t i = 0; i + 1 < p.knots.size(); ++i) {
    const double mid = 0.5 * (p.knots[i] + p.knots[i + 1]);
    worst = std::max(worst, std::abs(eval(p, mid).w - (1.0 + std::exp(-3.0 * mid))));
  }
  CHECK(worst < h * h * h * h);
  // tail extrapolation beyond rho_max
  const RadialEval t = eval(p, 5.0);
  CHECK(t.w == doctest::Approx(1.0 + std::exp(-15.0)).epsilon(1e-9));
  // below-domain is an error for exterior profiles
  RadialProfile ext = seed::ads_schw_profile(1.0, 8.0);
  CHECK_THROWS_AS(eval(ext, 0.1), std::domain_error);
}

TEST_CASE("cap_and_dip: trivial and legacy modes") {
  // m = 0, no cap, no dip reproduces w == 1 to 1e-12
  SeedParams trivial;
  const RadialProfile p0 = seed::build_seed(trivial, 10.0);
  for (double rho = 0.0; rho <= 10.0; rho += 0.1)
    CHECK(std::abs(eval(p0, rho).w - 1.0) < 1e-12);

  // m = 1, shallow cap (cap_depth = 0), no dip: crossings of H = 0 only at
  // rho_h; the +2 crossing sits at the outer r = 2m sphere; no H = -2 crossing
  SeedParams sp;
  sp.m = 1.0;
  sp.cap_depth = 0.0;
  const RadialProfile p1 = seed::cap_and_dip(seed::ads_schw_profile(1.0, 14.0), sp);
  const auto b = seed::bridge_info(1.0);
  CHECK(p1.complete);
  const RadialEval c0 = eval(p1, 0.0);
  CHECK(std::abs(c0.dw) < 1e-12);  // w'(0) = 0
  CHECK(c0.w > 0.0);

  const auto zero = seed::cmc_crossings(p1, 0.0, 0.02, 6.0);
  REQUIRE(zero.size() >= 1);
  CHECK(zero.back() == doctest::Approx(b.rho_h).epsilon(1e-7));
  const auto minus = seed::cmc_crossings(p1, -2.0, 0.02, 6.0);
  CHECK(minus.empty());
  const auto plus = seed::cmc_crossings(p1, 2.0, b.rho_h, 6.0);
  REQUIRE(plus.size() == 1);
  CHECK(plus[0] == doctest::Approx(b.rho_plus).epsilon(1e-7));
}

TEST_CASE("cap_and_dip: bridge mode carries the three nested spheres") {
  SeedParams sp;
  sp.m = 1.0;
  sp.cap_depth = 0.7;
  sp.delta = 0.35;
  const RadialProfile p = seed::cap_and_dip(seed::ads_schw_profile(1.0, 16.0), sp);
  const auto b = seed::bridge_info(1.0);

  CHECK(p.core_radius < b.rho_minus);
  const auto minus = seed::cmc_crossings(p, -2.0, p.core_radius * 1.02, 6.0);
  const auto zero = seed::cmc_crossings(p, 0.0, p.core_radius * 1.02, 6.0);
  const auto plus = seed::cmc_crossings(p, 2.0, p.core_radius * 1.02, 6.0);
  REQUIRE(!minus.empty());
  REQUIRE(!zero.empty());
  REQUIRE(!plus.empty());
  CHECK(minus.back() == doctest::Approx(b.rho_minus).epsilon(1e-6));
  CHECK(zero.back() == doctest::Approx(b.rho_h).epsilon(1e-6));
  CHECK(plus.back() == doctest::Approx(b.rho_plus).epsilon(1e-6));
  CHECK(minus.back() < zero.back());
  CHECK(zero.back() < plus.back());

  // C2 joints: one-sided limits at each joint, linearly extrapolated from
  // +-eps and +-2eps probes, agree to 1e-8 relative (the extrapolation removes
  // the genuine smooth variation; the residual is O(eps^2 * next derivative))
  const double eps = 1e-6;
  for (double joint : {p.core_radius, b.rho_h}) {
    const RadialEval l1 = eval(p, joint - eps), l2 = eval(p, joint - 2 * eps);
    const RadialEval r1 = eval(p, joint + eps), r2 = eval(p, joint + 2 * eps);
    const double wl = 2 * l1.w - l2.w, wr = 2 * r1.w - r2.w;
    const double dl = 2 * l1.dw - l2.dw, dr = 2 * r1.dw - r2.dw;
    const double sl = 2 * l1.d2w - l2.d2w, sr = 2 * r1.d2w - r2.d2w;
    CHECK(std::abs(wl - wr) < 1e-8 * std::abs(wr));
    CHECK(std::abs(dl - dr) < 1e-6 * (1.0 + std::abs(dr)));
    CHECK(std::abs(sl - sr) < 1e-4 * (1.0 + std::abs(sr)));
  }

  // positivity with margin for the shipped family
  double wmin = 1e300;
  for (double rho = 0.0; rho <= 16.0; rho += 0.003) wmin = std::min(wmin, eval(p, rho).w);
  CHECK(wmin > std::pow(5.0, -0.25));

  // R = -6 outside the core to quadrature accuracy
  for (double rho = p.core_radius * 1.05; rho < 15.0; rho += 0.05)
    CHECK(std::abs(scalar_curvature_radial(p, rho) + 6.0) < 1e-6);
}

TEST_CASE("dip creates extra crossings") {
  SeedParams sp;
  sp.dip_amp = 0.18;
  sp.dip_lo = 1.0;
  sp.dip_hi = 2.0;
  const RadialProfile p = seed::build_seed(sp, 10.0);  // m = 0 base
  // the falling flank pushes H below zero and the recovery above +2
  const auto plus = seed::cmc_crossings(p, 2.0, 0.5, 4.0);
  CHECK(plus.size() >= 2);
  // dip window overlapping the core cap is rejected
  SeedParams bad;
  bad.m = 1.0;
  bad.cap_depth = 0.7;
  bad.dip_amp = 0.1;
  bad.dip_lo = 0.01;
  bad.dip_hi = 0.3;
  CHECK_THROWS_AS(seed::cap_and_dip(seed::ads_schw_profile(1.0, 12.0), bad),
                  std::invalid_argument);
}

TEST_CASE("profile serialization round-trips bit-exactly") {
  SeedParams sp;
  sp.m = 1.0;
  sp.cap_depth = 0.7;
  sp.delta = 0.35;
  const RadialProfile p = seed::build_seed(sp, 12.0);
  const std::string path = (std::filesystem::temp_directory_path() / "ahm_profile_rt.txt").string();
  save_profile(path, p);
  const RadialProfile q = load_profile(path);
  REQUIRE(q.knots.size() == p.knots.size());
  for (size_t i = 0; i < p.knots.size(); ++i) {
    CHECK(q.knots[i] == p.knots[i]);
    CHECK(q.w[i] == p.w[i]);
    CHECK(q.dw[i] == p.dw[i]);
    CHECK(q.d2w[i] == p.d2w[i]);
  }
  CHECK(q.params.m == p.params.m);
  CHECK(q.core_radius == p.core_radius);
  std::filesystem::remove(path);
}

TEST_CASE("small mass seed for the sweep fixture family") {
  const auto b = seed::bridge_info(0.05);
  // all three spheres fit a ratio-2 annulus at small m
  CHECK(b.rho_plus < 2.0 * b.rho_minus);
  SeedParams sp;
  sp.m = 0.05;
  sp.cap_depth = 0.7;
  sp.delta = 0.04;
  const RadialProfile p = seed::build_seed(sp, 13.0);
  CHECK(p.core_radius <= sp.delta / 4.0);
  const auto minus = seed::cmc_crossings(p, -2.0, p.core_radius * 1.02, 1.0);
  const auto plus = seed::cmc_crossings(p, 2.0, p.core_radius * 1.02, 1.0);
  REQUIRE(!minus.empty());
  REQUIRE(!plus.empty());
  // placement in (delta/2, delta)
  CHECK(minus.back() > sp.delta / 2.0);
  CHECK(plus.back() < sp.delta);
}
