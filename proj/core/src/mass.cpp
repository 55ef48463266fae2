#include "ahm/mass.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ahm/seed.hpp"
#include "ahm/util.hpp"

namespace ahm {

namespace {

struct DirFit {
  double amplitude = 0.0, slope = 0.0, residual = 0.0;
  double lo = 0.0, hi = 0.0;
  bool ok = false;
};

// fit ln|w-1| ~ b - 3 rho on samples inside [cap, floor] signal bounds
DirFit fit_direction(const std::vector<double>& rho, const std::vector<double>& dev,
                     double noise_floor, double cap_value, double rho_hi_max) {
  DirFit out;
  std::vector<double> xs, ys;
  for (size_t i = 0; i < rho.size(); ++i) {
    const double d = std::abs(dev[i]);
    if (rho[i] > rho_hi_max) break;
    if (d >= cap_value || d <= noise_floor) continue;
    xs.push_back(rho[i]);
    ys.push_back(std::log(d));
  }
  if (xs.size() < 6 || xs.back() - xs.front() < 1.0) return out;
  // keep at most the last 2.5 units so the leading tail dominates
  while (xs.back() - xs.front() > 2.5) {
    xs.erase(xs.begin());
    ys.erase(ys.begin());
  }
  const LineFit free = fit_line(xs, ys);
  out.slope = free.slope;
  out.residual = free.residual;
  // slope-pinned amplitude: the mean of ln|w-1| + 3 rho
  double acc = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) acc += ys[i] + 3.0 * xs[i];
  out.amplitude = std::exp(acc / xs.size());
  out.lo = xs.front();
  out.hi = xs.back();
  out.ok = true;
  return out;
}

}  // namespace

AspectFit fit_aspect(const ConformalField& w, double noise_floor, double cap_value,
                     double edge_margin, double min_rho) {
  const PolarGrid& g = w.grid;
  AspectFit fit;
  fit.theta = g.theta;
  fit.amplitude.assign(g.nt(), 0.0);
  fit.slope.assign(g.nt(), 0.0);
  fit.window_lo.assign(g.nt(), 0.0);
  fit.window_hi.assign(g.nt(), 0.0);
  const double rho_hi_max = g.rho.back() - edge_margin;

  bool any = false;
  for (size_t k = 0; k < g.nt(); ++k) {
    std::vector<double> rho, dev;
    for (size_t j = 0; j < g.nr(); ++j) {
      if (g.rho[j] < min_rho) continue;
      rho.push_back(g.rho[j]);
      dev.push_back(w.at(j, k) - 1.0);
    }
    if (rho.size() < 6) continue;
    const DirFit d = fit_direction(rho, dev, noise_floor, cap_value, rho_hi_max);
    if (!d.ok) continue;  // direction below the floor: amplitude stays 0
    any = true;
    fit.amplitude[k] = std::copysign(d.amplitude, dev[std::lower_bound(rho.begin(), rho.end(),
                                                                       d.lo) -
                                                      rho.begin()]);
    fit.slope[k] = d.slope;
    fit.window_lo[k] = d.lo;
    fit.window_hi[k] = d.hi;
    fit.max_fit_residual = std::max(fit.max_fit_residual, d.residual);
  }
  fit.degenerate = !any;
  return fit;
}

RadialAspect fit_aspect_radial(const RadialProfile& p, double noise_floor, double cap_value) {
  RadialAspect out;
  std::vector<double> xs, ys;
  for (size_t i = 0; i < p.knots.size(); ++i) {
    const double d = std::abs(p.w[i] - 1.0);
    if (d >= cap_value || d <= noise_floor) continue;
    xs.push_back(p.knots[i]);
    ys.push_back(std::log(d));
  }
  if (xs.size() < 6 || xs.back() - xs.front() < 1.0) {
    out.degenerate = true;
    return out;
  }
  while (xs.back() - xs.front() > 3.0) {
    xs.erase(xs.begin());
    ys.erase(ys.begin());
  }
  const LineFit f = fit_line(xs, ys);
  out.slope = f.slope;
  double acc = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) acc += ys[i] + 3.0 * xs[i];
  out.amplitude = std::exp(acc / xs.size());
  return out;
}

MassReport asymptotic_mass(const AspectFit& fit, double c_cal) {
  MassReport rep;
  rep.c_cal = c_cal;
  rep.degenerate = fit.degenerate;
  if (fit.degenerate) return rep;

  const size_t n = fit.theta.size();
  // composite Simpson on the uniform theta grid (falls back to trapezoid on
  // an even node count), integrand 2 pi sin(theta) f(theta)
  auto integrate_sphere = [&](auto&& f) {
    double acc = 0.0;
    const size_t cells = n - 1;
    if (cells % 2 == 0 && cells >= 2) {
      const double h = (fit.theta.back() - fit.theta.front()) / cells;
      for (size_t k = 0; k < n; ++k) {
        const double wk = (k == 0 || k + 1 == n) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        acc += wk * f(k);
      }
      return acc * h / 3.0 * 2.0 * M_PI;
    }
    for (size_t k = 0; k + 1 < n; ++k)
      acc += 0.5 * (f(k) + f(k + 1)) * (fit.theta[k + 1] - fit.theta[k]);
    return acc * 2.0 * M_PI;
  };
  const double mono = integrate_sphere(
      [&](size_t k) { return c_cal * fit.amplitude[k] * std::sin(fit.theta[k]); });
  const double dip_z = integrate_sphere([&](size_t k) {
    return c_cal * fit.amplitude[k] * std::sin(fit.theta[k]) * std::cos(fit.theta[k]);
  });
  double asym = 0.0;
  for (size_t k = 0; k < n; ++k)
    asym = std::max(asym, std::abs(fit.amplitude[k] - fit.amplitude[n - 1 - k]));

  rep.monopole = mono;
  rep.dipole = {0.0, 0.0, dip_z};
  rep.aspect_asymmetry = asym;
  const double radicand = mono * mono - dip_z * dip_z;
  rep.radicand_negative = radicand < 0.0;
  rep.mass = std::sqrt(std::abs(radicand)) / (16.0 * M_PI);
  return rep;
}

double calibrate(double rho_max) {
  SeedParams sp;
  sp.m = 1.0;
  sp.cap_depth = 0.7;
  const RadialProfile p = seed::build_seed(sp, rho_max);
  const RadialAspect a = fit_aspect_radial(p);
  if (a.degenerate || a.amplitude <= 0.0)
    throw std::runtime_error("calibrate: degenerate unit-mass profile fit");
  // constant aspect A over the sphere gives M = c_cal * A / 4
  return 4.0 / a.amplitude;
}

}  // namespace ahm
