#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ahm/curvature.hpp"
#include "ahm/glue.hpp"
#include "ahm/grid.hpp"
#include "ahm/hypgeom.hpp"
#include "ahm/seed.hpp"
#include "ahm/util.hpp"
#include "oracles.hpp"

using namespace ahm;

namespace {

GlueConfig two_center_config(double tau, double m, double delta, GlueMode mode,
                             double rho_max) {
  SeedParams sp;
  sp.m = m;
  sp.cap_depth = 0.7;
  sp.delta = delta;
  GlueConfig cfg;
  cfg.tau = tau;
  cfg.centers = {tau, -tau};
  cfg.mode = mode;
  cfg.profiles = {seed::build_seed(sp, rho_max), seed::build_seed(sp, rho_max)};
  cfg.deltas = {delta, delta};
  return cfg;
}

struct ConstOne : FieldEvaluator {
  double value(double, double) const override { return 1.0; }
};

}  // namespace

TEST_CASE("cutoff eta") {
  const double a = 5.0, b = 6.0;
  CHECK(cutoff_eta(a, a, b) == 1.0);
  CHECK(cutoff_eta(b, a, b) == 0.0);
  CHECK(cutoff_eta(4.0, a, b) == 1.0);
  CHECK(cutoff_eta(7.0, a, b) == 0.0);
  // quintic smoothstep midpoint: 6/32 - 15/16 + 10/8 = 0.5
  CHECK(cutoff_eta(5.5, a, b) == doctest::Approx(0.5).epsilon(1e-15));

  // |eta''| <= 60/(b-a)^2 + 1e-6, via finite differences of eta
  double worst = 0.0;
  const double h = 1e-5;
  for (double s = a - 0.1; s <= b + 0.1; s += 1e-3) {
    const double d2 =
        (cutoff_eta(s + h, a, b) - 2.0 * cutoff_eta(s, a, b) + cutoff_eta(s - h, a, b)) / (h * h);
    worst = std::max(worst, std::abs(d2));
  }
  CHECK(worst <= 60.0 / sq(b - a) + 1e-6);
  // analytic second derivative agrees with FD
  const double s0 = 5.3;
  const double fd2 = (cutoff_eta(s0 + h, a, b) - 2 * cutoff_eta(s0, a, b) + cutoff_eta(s0 - h, a, b)) / (h * h);
  CHECK(cutoff_eta_d2(s0, a, b) == doctest::Approx(fd2).epsilon(1e-5));
}

TEST_CASE("config validation names the violated inequality") {
  auto cfg = two_center_config(4.0, 0.05, 0.04, GlueMode::Superposition, 16.0);
  CHECK_NOTHROW(validate(cfg));

  auto bad = cfg;
  bad.deltas = {0.5, 0.5};  // 2 tau = 8 < 10
  CHECK_THROWS_WITH_AS(validate(bad),
                       doctest::Contains("2*tau > 10*(delta_i + delta_j)"), ConfigError);

  bad = cfg;
  bad.tau = 2.0;
  bad.centers = {2.0, -2.0};
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("tau >= 3"), ConfigError);

  bad = cfg;
  bad.profiles[0] = seed::ads_schw_profile(1.0, 16.0);  // incomplete
  CHECK_THROWS_WITH_AS(validate(bad), doctest::Contains("not complete"), ConfigError);
}

TEST_CASE("glue trivial cases") {
  // all profiles == 1 -> w == 1
  GlueConfig cfg;
  cfg.tau = 4.0;
  cfg.centers = {4.0, -4.0};
  cfg.mode = GlueMode::Superposition;
  cfg.profiles = {seed::trivial_profile(16.0), seed::trivial_profile(16.0)};
  cfg.deltas = {0.0, 0.0};
  const GluedField gf(cfg);
  for (double rho : {0.0, 1.0, 4.0, 9.0})
    for (double th : {0.0, 0.7, 2.0, M_PI})
      CHECK(gf.value(rho, th) == doctest::Approx(1.0).epsilon(1e-14));

  // K = 1: w(x) = phi(rho(x)) exactly, no cutoff active
  SeedParams sp;
  sp.m = 1.0;
  sp.cap_depth = 0.7;
  sp.delta = 0.35;
  GlueConfig one;
  one.centers = {0.0};
  one.profiles = {seed::build_seed(sp, 16.0)};
  one.deltas = {0.35};
  const GluedField g1(one);
  for (double rho : {0.3, 1.0, 5.0, 14.0})
    for (double th : {0.0, 1.3})
      CHECK(g1.value(rho, th) == doctest::Approx(eval(one.profiles[0], rho).w).epsilon(1e-15));
}

TEST_CASE("three-zone form matches the pairwise construction pointwise") {
  const double tau = 4.0;
  auto cfg = two_center_config(tau, 1.0, 0.35, GlueMode::ThreeZone, 3 * tau + 4);
  const GluedField gf(cfg);
  const RadialProfile& phi1 = cfg.profiles[0];
  const RadialProfile& phi2 = cfg.profiles[1];

  // x in B_p(tau+1): w(x) = phi1(rho_p(x))
  for (double rho : {3.2, 4.0, 4.8}) {
    const double rp = axis_dist(tau, rho, 0.15);
    if (rp > tau + 1) continue;
    CHECK(gf.value(rho, 0.15) == doctest::Approx(eval(phi1, rp).w).epsilon(1e-15));
  }
  // x outside B_p(tau+2): w(x) = phi2(rho_o(x))  (points on the o side)
  for (double rho : {2.5, 5.0, 9.0}) {
    const double rp = axis_dist(tau, rho, M_PI);
    REQUIRE(rp > tau + 2);
    const double ro = axis_dist(-tau, rho, M_PI);
    CHECK(gf.value(rho, M_PI) == doctest::Approx(eval(phi2, ro).w).epsilon(1e-15));
  }
  // on the annulus: the eta-blend of the two factors
  {
    const double rho = 2.0 * tau + 1.5, th = 0.0;  // on the axis beyond p
    const double rp = axis_dist(tau, rho, th);
    REQUIRE(rp > tau + 1);
    REQUIRE(rp < tau + 2);
    const double ro = axis_dist(-tau, rho, th);
    const double eta = cutoff_eta(rp, tau + 1, tau + 2);
    const double expect = eta * eval(phi1, rp).w + (1 - eta) * eval(phi2, ro).w;
    CHECK(gf.value(rho, th) == doctest::Approx(expect).epsilon(1e-15));
  }
}

TEST_CASE("superposition form is reflection symmetric") {
  auto cfg = two_center_config(4.0, 0.05, 0.04, GlueMode::Superposition, 16.0);
  const GluedField gf(cfg);
  for (double rho : {0.0, 0.5, 2.0, 3.97, 4.5, 7.0, 11.0})
    for (double th : {0.1, 0.8, 1.2}) {
      const double a = gf.value(rho, th);
      const double b = gf.value(rho, M_PI - th);
      CHECK(std::abs(a - b) < 1e-12 * std::max(1.0, std::abs(a)));
    }
}

TEST_CASE("glued evaluator derivatives agree with finite differences") {
  auto cfg = two_center_config(4.0, 1.0, 0.35, GlueMode::Superposition, 16.0);
  const GluedField gf(cfg);
  const double h = 1e-5;
  for (double rho : {2.0, 3.6, 4.4, 5.5, 6.8})
    for (double th : {0.05, 0.4, 1.9}) {
      const GlueEval e = gf.full(rho, th);
      const double fd_r = (gf.value(rho + h, th) - gf.value(rho - h, th)) / (2 * h);
      const double fd_t = (gf.value(rho, th + h) - gf.value(rho, th - h)) / (2 * h);
      CHECK(e.d_rho == doctest::Approx(fd_r).epsilon(1e-6));
      CHECK(e.d_theta == doctest::Approx(fd_t).epsilon(1e-6));
      // Laplacian against the 2D stencil on a local fine patch
      const double hh = 5e-4;
      const double frr = (gf.value(rho + hh, th) - 2 * e.w + gf.value(rho - hh, th)) / (hh * hh);
      const double ftt = (gf.value(rho, th + hh) - 2 * e.w + gf.value(rho, th - hh)) / (hh * hh);
      const double lap_fd = frr + 2.0 / std::tanh(rho) * fd_r +
                            (ftt + std::cos(th) / std::sin(th) * fd_t) / sq(std::sinh(rho));
      CHECK(e.lap == doctest::Approx(lap_fd).epsilon(5e-4));
    }
}

TEST_CASE("curvature defect zones and tau decay") {
  // m = 0 seeds: defect at roundoff everywhere
  {
    GlueConfig cfg;
    cfg.tau = 4.0;
    cfg.centers = {4.0, -4.0};
    cfg.profiles = {seed::trivial_profile(16.0), seed::trivial_profile(16.0)};
    cfg.deltas = {0.0, 0.0};
    const GluedField gf(cfg);
    const PolarGrid g = build_grid({64, 0.05, 0.1, 0.15, 1.0, 1.12}, {4.0}, 16.0);
    const DefectSummary d = curvature_defect(gf, g);
    CHECK(d.max_annulus < 1e-10);
    CHECK(d.max_exact < 1e-10);
  }

  // three-zone, m = 1: off-annulus defect at quadrature tolerance, annulus
  // defect O(e^{-3 tau}), core O(1)
  {
    auto cfg = two_center_config(4.0, 1.0, 0.35, GlueMode::ThreeZone, 16.0);
    const GluedField gf(cfg);
    const PolarGrid g = build_grid({96, 0.03, 0.08, 0.12, 1.8, 1.12}, {4.0}, 16.0);
    const DefectSummary d = curvature_defect(gf, g);
    CHECK(d.max_exact < 2e-6);
    CHECK(d.max_annulus > 1e-6);
    CHECK(d.max_annulus < 1.0);
    CHECK(d.max_core > 1.0);
  }

  // tau sweep: fitted slope of ln(max annulus defect) vs tau <= -2.7
  {
    std::vector<double> taus = {3, 4, 5, 6}, lnd;
    for (double tau : taus) {
      auto cfg = two_center_config(tau, 0.05, 0.04, GlueMode::Superposition, 3 * tau + 4);
      const GluedField gf(cfg);
      const PolarGrid g = build_grid({96, 0.02, 0.08, 0.12, 0.5, 1.12}, {tau}, 3 * tau + 4);
      const DefectSummary d = curvature_defect(gf, g);
      lnd.push_back(std::log(d.max_annulus));
    }
    const double slope = oracles::lsq_slope(taus, lnd);
    CHECK(slope <= -2.7);
    // oracle: the law inherits the seed-tail decay at distance ~tau-2
    // from the far center, i.e. ratio about e^{-3} per unit tau
    CHECK(slope >= -3.6);
  }
}

TEST_CASE("discrete laplacian: exactness and convergence") {
  // constants -> 0
  const PolarGrid g = build_grid({64, 0.04, 0.04, 0.04, 1.0, 1.12}, {}, 6.0);
  std::vector<double> ones(g.size(), 3.7);
  const std::vector<double> lap0 = laplacian_h3(g, ones);
  for (size_t j = 0; j + 1 < g.nr(); ++j)
    for (size_t k = 0; k < g.nt(); ++k) CHECK(std::abs(lap0[g.idx(j, k)]) < 1e-12);

  // radial f = e^{-3 rho}: Delta f = (9 - 6 coth rho) e^{-3 rho}
  auto sample = [&](const PolarGrid& gr, auto&& fn) {
    std::vector<double> v(gr.size());
    for (size_t j = 0; j < gr.nr(); ++j)
      for (size_t k = 0; k < gr.nt(); ++k) v[gr.idx(j, k)] = fn(gr.rho[j], gr.theta[k]);
    return v;
  };
  // scan away from the center: e^{-3 rho} has a cone point at the origin
  auto err_radial = [&](int n_theta, double h) {
    const PolarGrid gr = build_grid({n_theta, h, h, h, 1.0, 1.12}, {}, 6.0);
    const auto f = sample(gr, [](double r, double) { return std::exp(-3.0 * r); });
    const auto lap = laplacian_h3(gr, f);
    double worst = 0.0;
    for (size_t j = 1; j + 1 < gr.nr(); ++j)
      for (size_t k = 0; k < gr.nt(); ++k) {
        const double rho = gr.rho[j];
        if (rho < 0.5) continue;
        const double exact = (9.0 - 6.0 / std::tanh(rho)) * std::exp(-3.0 * rho);
        worst = std::max(worst, std::abs(lap[gr.idx(j, k)] - exact));
      }
    return worst;
  };
  const double e1 = err_radial(32, 0.08), e2 = err_radial(32, 0.04);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.5);

  // smooth-at-center field: second order including the center rows
  auto err_smooth = [&](double h) {
    const PolarGrid gr = build_grid({int(std::lround(0.8 / h)), h, h, h, 1.0, 1.12}, {}, 4.0);
    auto fn = [](double r, double t) {
      return std::exp(-1.5 * r * r) * (1.0 + 0.4 * std::tanh(r) * std::cos(t));
    };
    const auto f = sample(gr, fn);
    const auto lap = laplacian_h3(gr, f);
    // reference by fine centered differences of the closed form
    double worst = 0.0;
    const double d = 1e-4;
    for (size_t j = 0; j + 1 < gr.nr(); ++j)
      for (size_t k = 1; k + 1 < gr.nt(); ++k) {
        const double rho = gr.rho[j], th = gr.theta[k];
        if (rho < 2 * d) continue;
        const double fr = (fn(rho + d, th) - fn(rho - d, th)) / (2 * d);
        const double frr = (fn(rho + d, th) - 2 * fn(rho, th) + fn(rho - d, th)) / (d * d);
        const double ft = (fn(rho, th + d) - fn(rho, th - d)) / (2 * d);
        const double ftt = (fn(rho, th + d) - 2 * fn(rho, th) + fn(rho, th - d)) / (d * d);
        const double exact = frr + 2.0 / std::tanh(rho) * fr +
                             (ftt + std::cos(th) / std::sin(th) * ft) / sq(std::sinh(rho));
        worst = std::max(worst, std::abs(lap[gr.idx(j, k)] - exact));
      }
    return worst;
  };
  const double s1 = err_smooth(0.1), s2 = err_smooth(0.05);
  CHECK(s1 / s2 > 2.8);
  CHECK(s1 / s2 < 6.0);

  // angular test function e^{-3 rho} cos theta: refinement ratio ~ 4
  auto err_ang = [&](int n_theta, double h) {
    const PolarGrid gr = build_grid({n_theta, h, h, h, 1.0, 1.12}, {}, 6.0);
    const auto f =
        sample(gr, [](double r, double t) { return std::exp(-3.0 * r) * std::cos(t); });
    const auto lap = laplacian_h3(gr, f);
    double worst = 0.0;
    for (size_t j = 1; j + 1 < gr.nr(); ++j)
      for (size_t k = 0; k < gr.nt(); ++k) {
        const double rho = gr.rho[j], th = gr.theta[k];
        const double exact =
            ((9.0 - 6.0 / std::tanh(rho)) - 2.0 / sq(std::sinh(rho))) * std::exp(-3.0 * rho) *
            std::cos(th);
        worst = std::max(worst, std::abs(lap[gr.idx(j, k)] - exact));
      }
    return worst;
  };
  const double a1 = err_ang(24, 0.1), a2 = err_ang(48, 0.05);
  CHECK(a1 / a2 > 3.0);
  CHECK(a1 / a2 < 5.5);
}

TEST_CASE("stencil scalar curvature") {
  const PolarGrid g = build_grid({96, 0.02, 0.02, 0.02, 1.0, 1.12}, {}, 6.0);
  // w == 1 -> R == -6
  std::vector<double> ones(g.size(), 1.0);
  const auto R1 = scalar_curvature_stencil(g, ones);
  for (size_t j = 0; j + 1 < g.nr(); ++j)
    for (size_t k = 0; k < g.nt(); ++k) CHECK(std::abs(R1[g.idx(j, k)] + 6.0) < 1e-10);

  // w = 1 + eps e^{-3 rho}: |R + 6| <= 48 eps (coth - 1) e^{-3 rho} + O(eps^2)
  const double eps = 1e-3;
  std::vector<double> w(g.size());
  for (size_t j = 0; j < g.nr(); ++j)
    for (size_t k = 0; k < g.nt(); ++k)
      w[g.idx(j, k)] = 1.0 + eps * std::exp(-3.0 * g.rho[j]);
  const auto R = scalar_curvature_stencil(g, w);
  for (size_t j = 1; j + 1 < g.nr(); ++j) {
    const double rho = g.rho[j];
    if (rho < 0.3) continue;  // skip the center-adjacent rows (stencil error dominates)
    const double envelope =
        48.0 * eps * (1.0 / std::tanh(rho) - 1.0) * std::exp(-3.0 * rho) + 60.0 * eps * eps +
        2e-4 * eps * std::exp(-3.0 * rho);
    CHECK(std::abs(R[g.idx(j, 0)] + 6.0) <= envelope);
  }

  CHECK_THROWS_AS(scalar_curvature_stencil(g, std::vector<double>(g.size(), -1.0)),
                  std::domain_error);
}

TEST_CASE("mean curvature evaluators") {
  // w == 1: H = 2 coth rho -> 2
  ConstOne one;
  CHECK(mean_curvature_sphere(one, 0.0, 1.0, 0.3, 1e-4) ==
        doctest::Approx(2.0 / std::tanh(1.0)).epsilon(1e-10));
  CHECK(mean_curvature_sphere(one, 0.0, 12.0, 1.0, 1e-4) == doctest::Approx(2.0).epsilon(1e-8));

  // first-variation-of-area oracle on three radial profiles
  struct RadialField : FieldEvaluator {
    const RadialProfile* p;
    double value(double rho, double) const override { return eval(*p, rho).w; }
  };
  SeedParams s1, s2, s3;
  s1.m = 1.0;
  s1.cap_depth = 0.7;
  s2.m = 0.3;
  s2.cap_depth = 0.5;
  s3.m = 0.05;
  s3.cap_depth = 0.7;
  for (const SeedParams& sp : {s1, s2, s3}) {
    const RadialProfile p = seed::build_seed(sp, 14.0);
    RadialField f;
    f.p = &p;
    for (double r : {0.8 * seed::bridge_info(sp.m).rho_h, 2.0 * seed::bridge_info(sp.m).rho_h,
                     1.0, 2.5}) {
      if (r <= p.core_radius * 1.1) continue;
      const double impl = mean_curvature_radial(p, r);
      const double orac = oracles::first_variation_H(
          [&](double rr) { return eval(p, rr).w; }, r, 1e-5);
      CHECK(impl == doctest::Approx(orac).epsilon(1e-4));
      // the sphere evaluator agrees with the radial closed form (FD-limited)
      CHECK(mean_curvature_sphere(f, 0.0, r, 0.9, 1e-5) == doctest::Approx(impl).epsilon(2e-5));
    }
  }

  // AdS-Schw m=1 minimal sphere via the 2D path
  {
    SeedParams sp;
    sp.m = 1.0;
    sp.cap_depth = 0.7;
    sp.delta = 0.35;
    GlueConfig one_center;
    one_center.centers = {0.0};
    one_center.profiles = {seed::build_seed(sp, 16.0)};
    one_center.deltas = {0.35};
    const GluedField gf(one_center);
    struct GlueEvalField : FieldEvaluator {
      const GluedField* g;
      double value(double rho, double th) const override { return g->value(rho, th); }
    } fe;
    fe.g = &gf;
    const double rho_h = seed::bridge_info(1.0).rho_h;
    CHECK(std::abs(mean_curvature_sphere(fe, 0.0, rho_h, 1.1, 1e-5)) < 1e-6);
  }
}

TEST_CASE("grid and interpolation") {
  const PolarGrid g = build_grid({64, 0.02, 0.06, 0.1, 1.0, 1.12}, {4.0}, 16.0);
  CHECK(g.rho.front() == 0.0);
  CHECK(g.rho.back() == doctest::Approx(16.0));
  // smooth grading
  for (size_t j = 2; j + 1 < g.nr(); ++j) {
    const double r = (g.rho[j + 1] - g.rho[j]) / (g.rho[j] - g.rho[j - 1]);
    CHECK(r < 1.35);
    CHECK(r > 1.0 / 1.35);
  }
  // fine band covers the center radius
  bool has_fine = false;
  for (size_t j = 1; j < g.nr(); ++j)
    if (std::abs(g.rho[j] - 4.0) < 0.5 && g.rho[j] - g.rho[j - 1] < 0.021) has_fine = true;
  CHECK(has_fine);

  // interpolation reproduces a field smooth at the origin to high order
  // (tanh(rho) cos(theta) * even radial factor extends smoothly through 0)
  ConformalField f;
  f.grid = g;
  f.w.resize(g.size());
  auto fn = [](double rho, double th) {
    return 1.0 + 0.3 * std::exp(-0.7 * rho * rho) * std::tanh(rho) * std::cos(th);
  };
  for (size_t j = 0; j < g.nr(); ++j)
    for (size_t k = 0; k < g.nt(); ++k) f.w[g.idx(j, k)] = fn(g.rho[j], g.theta[k]);
  double worst = 0.0;
  for (double rho : {0.01, 0.37, 3.99, 9.271})
    for (double th : {0.001, 0.73, 2.9, 3.14})
      worst = std::max(worst, std::abs(interp(f, rho, th) - fn(rho, th)));
  CHECK(worst < 3e-5);
}
