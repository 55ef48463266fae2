#include "ahm/glue.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ahm/hypgeom.hpp"
#include "ahm/seed.hpp"
#include "ahm/util.hpp"

namespace ahm {

void validate(const GlueConfig& cfg) {
  const size_t k = cfg.num_centers();
  if (k == 0) throw ConfigError("glue config: at least one center required");
  if (cfg.profiles.size() != k || cfg.deltas.size() != k)
    throw ConfigError("glue config: centers, profiles and deltas must have equal length");
  for (size_t i = 0; i < k; ++i)
    if (!cfg.profiles[i].complete)
      throw ConfigError("glue config: profile " + std::to_string(i) + " is not complete");
  if (cfg.mode == GlueMode::ThreeZone && k != 2)
    throw ConfigError("glue config: three-zone form requires exactly two centers");
  if (k == 1) return;

  if (!(cfg.tau >= 3.0)) throw ConfigError("glue config: violated tau >= 3");
  for (size_t i = 0; i < k; ++i)
    for (size_t j = i + 1; j < k; ++j) {
      const double d = std::abs(cfg.centers[i] - cfg.centers[j]);
      if (!(d > 10.0 * (cfg.deltas[i] + cfg.deltas[j])))
        throw ConfigError(
            "glue config: violated 2*tau > 10*(delta_i + delta_j) for centers " +
            std::to_string(i) + "," + std::to_string(j));
      if (!(d >= 2.0 * cfg.tau - 1e-12))
        throw ConfigError("glue config: violated pairwise separation >= 2*tau");
      // each transition annulus must clear the companion horizon ball
      const double half = d / 2.0;
      if (!(d > half + 2.0 + std::max(cfg.deltas[i], cfg.deltas[j])))
        throw ConfigError("glue config: violated overlapping transition annuli for centers " +
                          std::to_string(i) + "," + std::to_string(j));
    }
}

double cutoff_eta(double s, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("cutoff_eta: need a < b");
  return 1.0 - smoothstep5((s - a) / (b - a));
}
double cutoff_eta_d1(double s, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("cutoff_eta: need a < b");
  return -smoothstep5_d1((s - a) / (b - a)) / (b - a);
}
double cutoff_eta_d2(double s, double a, double b) {
  if (!(a < b)) throw std::invalid_argument("cutoff_eta: need a < b");
  return -smoothstep5_d2((s - a) / (b - a)) / ((b - a) * (b - a));
}

GluedField::GluedField(GlueConfig cfg) : cfg_(std::move(cfg)) {
  validate(cfg_);
  const size_t n = cfg_.num_centers();
  half_sep_.assign(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double dmin = 1e300;
    for (size_t j = 0; j < n; ++j)
      if (j != i) dmin = std::min(dmin, std::abs(cfg_.centers[i] - cfg_.centers[j]));
    half_sep_[i] = (n == 1) ? 1e300 : dmin / 2.0;
  }

  // excision radii: the conformality radius delta/4 widened to clear the
  // residual interpolation-noise band around the core cap, clamped below the
  // seed's innermost sphere so detection regions stay intact
  pin_.assign(n, 0.0);
  for (size_t k = 0; k < n; ++k) {
    const RadialProfile& p = cfg_.profiles[k];
    if (p.core_radius == 0.0 && cfg_.deltas[k] == 0.0) continue;
    double pin = std::max(cfg_.deltas[k] / 4.0, 2.2 * p.core_radius);
    if (p.core_radius > 0.0) {
      const auto inner =
          seed::cmc_crossings(p, -2.0, 1.02 * p.core_radius, std::min(4.0, p.rho_max()));
      if (!inner.empty()) pin = std::min(pin, 0.85 * inner.front());
    }
    pin_[k] = pin;
  }
}

double GluedField::pin_radius(size_t k) const { return pin_[k]; }

double GluedField::center_dist(size_t k, double rho, double theta) const {
  return axis_dist(cfg_.centers[k], rho, theta);
}

GluedField::TermEval GluedField::term(size_t k, double r) const {
  const RadialEval e = eval(cfg_.profiles[k], r);
  if (half_sep_[k] > 1e200) return {e.w - 1.0, e.dw, e.d2w};  // single center: no cutoff
  const double a = window_lo(k), b = window_hi(k);
  if (r <= a) return {e.w - 1.0, e.dw, e.d2w};
  if (r >= b) return {0.0, 0.0, 0.0};
  const double eta = cutoff_eta(r, a, b);
  const double de = cutoff_eta_d1(r, a, b);
  const double d2e = cutoff_eta_d2(r, a, b);
  const double v = e.w - 1.0;
  return {eta * v, eta * e.dw + de * v, eta * e.d2w + 2.0 * de * e.dw + d2e * v};
}

namespace {

struct CenterGeom {
  double r;             // distance to the center
  double dr_drho;       // chart partials of the distance
  double dr_dtheta;
  double lap_dist;      // hyperbolic Laplacian of the distance function: 2 coth r
};

CenterGeom center_geom(double s, double rho, double theta) {
  CenterGeom g;
  if (s == 0.0) {
    g.r = rho;
    g.dr_drho = 1.0;
    g.dr_dtheta = 0.0;
  } else {
    g.r = axis_dist(s, rho, theta);
    if (g.r < 1e-12) {  // at the center: the caller's radial special case applies
      g.dr_drho = g.dr_dtheta = 0.0;
      g.lap_dist = 0.0;
      return g;
    }
    const AxisDistDerivs d = axis_dist_derivs(s, rho, theta);
    g.dr_drho = d.d_rho;
    g.dr_dtheta = d.d_theta;
  }
  g.lap_dist = 2.0 / std::tanh(std::max(g.r, 1e-300));
  return g;
}

}  // namespace

double GluedField::value(double rho, double theta) const {
  const size_t n = cfg_.num_centers();
  if (cfg_.mode == GlueMode::ThreeZone) {
    const double rp = center_dist(0, rho, theta);
    if (rp <= window_lo(0)) return eval(cfg_.profiles[0], rp).w;
    const double ro = center_dist(1, rho, theta);
    if (rp >= window_hi(0)) return eval(cfg_.profiles[1], ro).w;
    const double eta = cutoff_eta(rp, window_lo(0), window_hi(0));
    return eta * eval(cfg_.profiles[0], rp).w + (1.0 - eta) * eval(cfg_.profiles[1], ro).w;
  }
  double w = 1.0;
  for (size_t k = 0; k < n; ++k) w += term(k, center_dist(k, rho, theta)).v;
  return w;
}

GlueEval GluedField::full(double rho, double theta) const {
  GlueEval out;
  const size_t n = cfg_.num_centers();

  if (cfg_.mode == GlueMode::ThreeZone) {
    // radial pieces about p (index 0) and o (index 1) plus the product term
    const CenterGeom gp = center_geom(cfg_.centers[0], rho, theta);
    const double a = window_lo(0), b = window_hi(0);
    const RadialEval p1 = eval(cfg_.profiles[0], gp.r);
    if (gp.r <= a) {
      out.w = p1.w;
      out.d_rho = p1.dw * gp.dr_drho;
      out.d_theta = p1.dw * gp.dr_dtheta;
      out.lap = p1.d2w + gp.lap_dist * p1.dw;
    } else {
      const CenterGeom go = center_geom(cfg_.centers[1], rho, theta);
      const RadialEval p2 = eval(cfg_.profiles[1], go.r);
      if (gp.r >= b) {
        out.w = p2.w;
        out.d_rho = p2.dw * go.dr_drho;
        out.d_theta = p2.dw * go.dr_dtheta;
        out.lap = p2.d2w + go.lap_dist * p2.dw;
      } else {
        const double eta = cutoff_eta(gp.r, a, b), de = cutoff_eta_d1(gp.r, a, b),
                     d2e = cutoff_eta_d2(gp.r, a, b);
        // A(r_p) = eta * phi1,  B = (1 - eta(r_p)),  C(r_o) = phi2
        const double A = eta * p1.w, dA = eta * p1.dw + de * p1.w,
                     d2A = eta * p1.d2w + 2 * de * p1.dw + d2e * p1.w;
        const double B = 1.0 - eta, dB = -de, d2B = -d2e;
        const double cosang = grad_dist_cos_angle(cfg_.centers[0], cfg_.centers[1], rho, theta);
        out.w = A + B * p2.w;
        out.d_rho = dA * gp.dr_drho + dB * gp.dr_drho * p2.w + B * p2.dw * go.dr_drho;
        out.d_theta = dA * gp.dr_dtheta + dB * gp.dr_dtheta * p2.w + B * p2.dw * go.dr_dtheta;
        // Laplacian of radial(r_p) pieces, radial(r_o) piece, and the cross term
        const double lapA = d2A + gp.lap_dist * dA;
        const double lapB = d2B + gp.lap_dist * dB;
        const double lapC = p2.d2w + go.lap_dist * p2.dw;
        out.lap = lapA + p2.w * lapB + B * lapC + 2.0 * dB * p2.dw * cosang;
      }
    }
  } else {
    double w = 1.0, drho = 0.0, dth = 0.0, lap = 0.0;
    for (size_t k = 0; k < n; ++k) {
      const CenterGeom g = center_geom(cfg_.centers[k], rho, theta);
      if (g.r < 1e-12) {
        // at the center node: radial term is smooth with zero gradient
        const TermEval t = term(k, 0.0);
        w += t.v;
        lap += 3.0 * t.d2;
        continue;
      }
      const TermEval t = term(k, g.r);
      w += t.v;
      drho += t.d1 * g.dr_drho;
      dth += t.d1 * g.dr_dtheta;
      lap += t.d2 + g.lap_dist * t.d1;
    }
    out.w = w;
    out.d_rho = drho;
    out.d_theta = dth;
    out.lap = lap;
  }

  if (out.w <= 0.0) throw std::domain_error("GluedField: w <= 0");
  const double w5 = out.w * out.w * out.w * out.w * out.w;
  out.R = (-8.0 * out.lap - 6.0 * out.w) / w5;
  return out;
}

double GluedField::radial_derivative(size_t k, double rho, double theta) const {
  // chain rule: sum over terms of d(term_j)/d(r_j) * <grad r_j, grad r_k>
  const size_t n = cfg_.num_centers();
  const double rk = center_dist(k, rho, theta);
  if (rk < 1e-12) throw std::domain_error("radial_derivative: at the center");
  double out = 0.0;
  if (cfg_.mode == GlueMode::ThreeZone) throw std::logic_error("radial_derivative: superposition only");
  for (size_t j = 0; j < n; ++j) {
    const double rj = center_dist(j, rho, theta);
    if (rj < 1e-12) continue;  // smooth maximum of the companion term; gradient ~ 0
    const TermEval t = term(j, rj);
    if (t.d1 == 0.0) continue;
    const double cosang = (j == k) ? 1.0
                                   : grad_dist_cos_angle(cfg_.centers[j], cfg_.centers[k], rho, theta);
    out += t.d1 * cosang;
  }
  return out;
}

ConformalField glue(const GluedField& gf, const PolarGrid& grid) {
  ConformalField f;
  f.grid = grid;
  f.provenance = "glued";
  f.w.resize(grid.size());
  for (size_t j = 0; j < grid.nr(); ++j)
    for (size_t k = 0; k < grid.nt(); ++k)
      f.w[grid.idx(j, k)] = gf.value(grid.rho[j], grid.theta[k]);
  return f;
}

Zone classify(const GluedField& gf, double rho, double theta) {
  const GlueConfig& cfg = gf.config();
  for (size_t k = 0; k < cfg.num_centers(); ++k) {
    const double r = gf.center_dist(k, rho, theta);
    if (r <= std::max(gf.pin_radius(k), 1.05 * cfg.profiles[k].core_radius)) return Zone::Core;
    if (cfg.num_centers() > 1 && r >= gf.window_lo(k) && r <= gf.window_hi(k))
      return Zone::Annulus;
    // dipped profiles are inexact on the dip window as well
    const SeedParams& sp = cfg.profiles[k].params;
    if (sp.dip_amp != 0.0 && r >= sp.dip_lo && r <= sp.dip_hi) return Zone::Core;
  }
  return Zone::Exact;
}

DefectSummary curvature_defect(const GluedField& gf, const PolarGrid& grid) {
  DefectSummary s;
  for (size_t j = 0; j < grid.nr(); ++j)
    for (size_t k = 0; k < grid.nt(); ++k) {
      const double rho = grid.rho[j], th = grid.theta[k];
      const double defect = std::abs(gf.full(rho, th).R + 6.0);
      switch (classify(gf, rho, th)) {
        case Zone::Core:
          s.max_core = std::max(s.max_core, defect);
          break;
        case Zone::Annulus:
          if (defect > s.max_annulus) {
            s.max_annulus = defect;
            s.annulus_rho = rho;
            s.annulus_theta = th;
          }
          break;
        case Zone::Exact:
          s.max_exact = std::max(s.max_exact, defect);
          break;
      }
    }
  return s;
}

}  // namespace ahm
