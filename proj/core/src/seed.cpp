#include "ahm/seed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "ahm/util.hpp"

namespace ahm::seed {

namespace {

// ---------------------------------------------------------------- quadrature

// Gauss-Kronrod 7-15 pair (QUADPACK dqk15 constants).
constexpr double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                            0.741531185599394, 0.586087235467691, 0.405845151377397,
                            0.207784955007898, 0.0};
constexpr double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                            0.140653259715525, 0.169004726639267, 0.190350578064785,
                            0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                           0.417959183673469};

struct PanelResult {
  double value;
  double error;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double resk = kWgk[7] * fc;
  double resg = kWg[3] * fc;
  for (int j = 0; j < 7; ++j) {
    const double fv = f(c - h * kXgk[j]) + f(c + h * kXgk[j]);
    resk += kWgk[j] * fv;
    if (j % 2 == 1) resg += kWg[j / 2] * fv;
  }
  return {resk * h, std::abs((resk - resg) * h)};
}

double adapt(const std::function<double(double)>& f, double a, double b, double rtol,
             double atol, int depth, double scale) {
  const PanelResult r = gk15(f, a, b);
  if (r.error <= std::max(atol, rtol * std::max(scale, std::abs(r.value))) || depth >= 52)
    return r.value;
  const double c = 0.5 * (a + b);
  return adapt(f, a, c, rtol, atol, depth + 1, scale) +
         adapt(f, c, b, rtol, atol, depth + 1, scale);
}

double integrate(const std::function<double(double)>& f, double a, double b,
                 double rtol = 1e-12, double atol = 1e-15) {
  if (a == b) return 0.0;
  return adapt(f, a, b, rtol, atol, 0, 0.0);
}

// ---------------------------------------------------------------- slice data

double horizon_radius(double m) {
  // positive root of r^3 + r - 2m (monotone)
  double lo = 0.0, hi = std::max(1.0, std::cbrt(2.0 * m));
  while (hi * hi * hi + hi < 2.0 * m) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * mid * mid + mid < 2.0 * m ? lo : hi) = mid;
  }
  double r = 0.5 * (lo + hi);
  for (int i = 0; i < 4; ++i) r -= (r * r * r + r - 2.0 * m) / (3.0 * r * r + 1.0);
  return r;
}

double metric_f(double m, double s) { return 1.0 + s * s - 2.0 * m / s; }

struct Slice {
  double m, r_h, psi_h;

  // q(s) in the exact factorization f(s) = (s - r_h) q(s)
  double q(double s) const { return s + r_h + 2.0 * m / (s * r_h); }

  // Psi(r) = int_r^inf ds / (s sqrt(f)); throat piece via s = r_h + u^2,
  // improper tail via s = 1/t.
  double psi(double r) const {
    if (r < r_h - 1e-12) throw std::domain_error("psi: r below horizon radius");
    r = std::max(r, r_h);
    const double split = std::max({2.0 * r_h, 4.0 * m, 2.0, r});
    double total = 0.0;
    if (r < split) {
      const double ua = std::sqrt(r - r_h), ub = std::sqrt(split - r_h);
      total += integrate(
          [this](double u) {
            const double s = r_h + u * u;
            return 2.0 / (s * std::sqrt(q(s)));
          },
          ua, ub);
    }
    total += integrate(
        [this](double t) { return 1.0 / std::sqrt(1.0 + t * t - 2.0 * m * t * t * t); }, 0.0,
        1.0 / split);
    return total;
  }

  // invert Psi(r_h + u^2) = target on u >= 0 (monotone decreasing)
  double invert_to_r(double target) const {
    if (target > psi_h + 1e-13) throw std::domain_error("invert_to_r: target above psi_h");
    target = std::min(target, psi_h);
    if (target <= 0.0) throw std::domain_error("invert_to_r: nonpositive target");
    double ulo = 0.0;  // psi = psi_h
    double uhi = 1.0;
    while (psi(r_h + uhi * uhi) > target) uhi *= 2.0;
    double u = 0.5 * (ulo + uhi);
    for (int i = 0; i < 100; ++i) {
      const double s = r_h + u * u;
      const double val = psi(s) - target;
      if (std::abs(val) < 1e-14 * std::max(1.0, target)) break;
      (val > 0.0 ? ulo : uhi) = u;
      const double dpsi_du = -2.0 / (s * std::sqrt(q(s)));
      double un = u - val / dpsi_du;
      if (!(un > ulo && un < uhi)) un = 0.5 * (ulo + uhi);
      if (std::abs(un - u) < 1e-16 * std::max(1.0, u)) {
        u = un;
        break;
      }
      u = un;
    }
    return r_h + u * u;
  }
};

Slice make_slice(double m) {
  Slice sl;
  sl.m = m;
  sl.r_h = horizon_radius(m);
  sl.psi_h = 0.0;
  sl.psi_h = sl.psi(sl.r_h);
  return sl;
}

// Conformal factor and derivative on the slice at matched (r, rho).
// branch +1: exterior (dr/drho > 0), -1: inner continuation.
struct WPoint {
  double rho, w, dw;
};

WPoint w_at(const Slice& sl, double r, double rho, int branch) {
  const double sh = std::sinh(rho);
  const double w = std::sqrt(r / sh);
  const double rootf = std::sqrt(std::max(0.0, metric_f(sl.m, r)));
  const double dw = (branch > 0) ? (r / (2.0 * w * sh * sh)) * (rootf - std::cosh(rho))
                                 : -(r / (2.0 * w * sh * sh)) * (rootf + std::cosh(rho));
  return {rho, w, dw};
}

// rho on the requested branch for the throat parameter u (r = r_h + u^2);
// forward evaluation only, so the knot tuples stay consistent to rounding
double rho_of_u(const Slice& sl, double u, int branch) {
  const double psi_r = sl.psi(sl.r_h + u * u);
  const double e = (branch > 0) ? std::exp(-psi_r) : std::exp(-(2.0 * sl.psi_h - psi_r));
  return 2.0 * std::atanh(e);
}

// Far-field series in x = e^{-rho}: w = 1 + m x^3 + m x^5 + O(x^6).
WPoint w_series(double m, double rho) {
  const double x = std::exp(-rho);
  const double x3 = x * x * x, x5 = x3 * x * x;
  return {rho, 1.0 + m * (x3 + x5), -m * (3.0 * x3 + 5.0 * x5)};
}

double ode_d2w(double rho, double w, double dw) {
  // R = -6 radial equation: w'' = (3/4)(w^5 - w) - 2 coth(rho) w'
  return 0.75 * (w * w * w * w * w - w) - 2.0 / std::tanh(rho) * dw;
}

void push_knot(RadialProfile& p, double rho, double w, double dw, double d2w) {
  p.knots.push_back(rho);
  p.w.push_back(w);
  p.dw.push_back(dw);
  p.d2w.push_back(d2w);
}

// Even degree-6 polynomial a0 + a2 r^2 + a4 r^4 + a6 r^6 matching
// (w, w', w'', w''') at rc.  w'(0) = 0 by parity.
struct CorePoly {
  double a0, a2, a4, a6;
  double w(double r) const {
    const double r2 = r * r;
    return a0 + r2 * (a2 + r2 * (a4 + r2 * a6));
  }
  double dw(double r) const {
    const double r2 = r * r;
    return r * (2 * a2 + r2 * (4 * a4 + r2 * 6 * a6));
  }
  double d2w(double r) const {
    const double r2 = r * r;
    return 2 * a2 + r2 * (12 * a4 + r2 * 30 * a6);
  }
};

CorePoly fit_core(double rc, double w, double dw, double d2w, double d3w) {
  // rows: value, d1, d2, d3 in the basis {1, r^2, r^4, r^6} at rc
  double A[4][5] = {
      {1, rc * rc, std::pow(rc, 4), std::pow(rc, 6), w},
      {0, 2 * rc, 4 * std::pow(rc, 3), 6 * std::pow(rc, 5), dw},
      {0, 2, 12 * rc * rc, 30 * std::pow(rc, 4), d2w},
      {0, 0, 24 * rc, 120 * std::pow(rc, 3), d3w},
  };
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    if (A[c][c] == 0.0) throw std::runtime_error("fit_core: singular system");
    for (int r = c + 1; r < 4; ++r) {
      const double fac = A[r][c] / A[c][c];
      for (int k = c; k < 5; ++k) A[r][k] -= fac * A[c][k];
    }
  }
  double a[4];
  for (int r = 3; r >= 0; --r) {
    double s = A[r][4];
    for (int k = r + 1; k < 4; ++k) s -= A[r][k] * a[k];
    a[r] = s / A[r][r];
  }
  return {a[0], a[1], a[2], a[3]};
}

struct Dip {
  double amp, lo, hi;
  bool active() const { return amp != 0.0; }
  // factor 1 - amp * bump(t) with a C2 up-down bump peaking at the window mid
  void factor(double rho, double& f, double& df, double& d2f) const {
    const double width = hi - lo;
    const double t = (rho - lo) / width;
    if (t <= 0.0 || t >= 1.0) {
      f = 1.0;
      df = d2f = 0.0;
      return;
    }
    double b, db, d2b;
    if (t <= 0.5) {
      b = smoothstep5(2 * t);
      db = 2 * smoothstep5_d1(2 * t);
      d2b = 4 * smoothstep5_d2(2 * t);
    } else {
      b = smoothstep5(2 - 2 * t);
      db = -2 * smoothstep5_d1(2 - 2 * t);
      d2b = 4 * smoothstep5_d2(2 - 2 * t);
    }
    f = 1.0 - amp * b;
    df = -amp * db / width;
    d2f = -amp * d2b / (width * width);
  }
};

void apply_dip(RadialProfile& p, const Dip& dip) {
  // refine knots inside the window, then multiply
  std::vector<double> knots = p.knots;
  const double step = (dip.hi - dip.lo) / 80.0;
  for (double r = dip.lo; r <= dip.hi + 1e-15; r += step) knots.push_back(r);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              knots.end());
  RadialProfile out = p;
  out.knots.clear();
  out.w.clear();
  out.dw.clear();
  out.d2w.clear();
  for (double r : knots) {
    if (r < p.rho_min() - 1e-12) continue;
    const RadialEval e = eval(p, r);
    double f, df, d2f;
    dip.factor(r, f, df, d2f);
    push_knot(out, r, e.w * f, e.dw * f + e.w * df, e.d2w * f + 2.0 * e.dw * df + e.w * d2f);
  }
  p = out;
}

}  // namespace

BridgeInfo bridge_info(double m) {
  if (m <= 0.0) throw std::invalid_argument("bridge_info: m must be positive");
  const Slice sl = make_slice(m);
  BridgeInfo b;
  b.r_h = sl.r_h;
  b.psi_h = sl.psi_h;
  b.rho_h = 2.0 * std::atanh(std::exp(-sl.psi_h));
  b.rho_puncture = 2.0 * std::atanh(std::exp(-2.0 * sl.psi_h));
  const double psi_2m = sl.psi(2.0 * m);
  b.rho_plus = 2.0 * std::atanh(std::exp(-psi_2m));
  b.rho_minus = 2.0 * std::atanh(std::exp(-(2.0 * sl.psi_h - psi_2m)));
  return b;
}

double psi(double m, double r) { return make_slice(m).psi(r); }

RadialProfile trivial_profile(double rho_max) {
  if (rho_max <= 0.0) throw std::invalid_argument("trivial_profile: rho_max <= 0");
  RadialProfile p;
  p.complete = true;
  for (double r = 0.0; r < rho_max + 0.124; r += 0.125) push_knot(p, std::min(r, rho_max), 1.0, 0.0, 0.0);
  return p;
}

RadialProfile ads_schw_profile(double m, double rho_max) {
  if (m <= 0.0) throw std::invalid_argument("ads_schw_profile: m must be positive");
  const Slice sl = make_slice(m);
  const BridgeInfo b = bridge_info(m);
  if (rho_max < b.rho_h + 1.0)
    throw std::invalid_argument("ads_schw_profile: rho_max too close to the horizon radius");
  RadialProfile p;
  p.params.m = m;
  p.complete = false;
  p.decay_amplitude = m;
  const double rho_sw = std::max(6.0, b.rho_h + 0.5);

  // knot spacing: resolves the throat structure (spacing proportional to the
  // distance from the inner end) and then follows the balance between the
  // h^4 interpolation bias and the eps/h^2 rounding amplification of the
  // second-derivative read
  const double h_start = std::min(2.5e-3, (b.rho_plus - b.rho_h) / 40.0);
  auto h_rule = [&](double rho, double h_prev) {
    const double tail = std::max(m * std::exp(-3.0 * rho), 1e-14);
    const double env = std::pow(8.5e-18 / tail, 1.0 / 6.0);
    const double structure = std::max(0.004 * (rho - b.rho_puncture), h_start);
    return std::min({0.05, std::max(env, h_start), structure, h_prev * 1.06});
  };

  // march outward in the throat parameter u (r = r_h + u^2): every knot tuple
  // is a forward evaluation at matched (r, rho), so the data are consistent
  // to rounding; d rho / d u = 2 sinh(rho) / (r sqrt(q))
  double u = 0.0, rho = b.rho_h, h = h_start;
  const double rho_end = std::min(rho_sw, rho_max);
  while (rho < rho_end) {
    const double r = sl.r_h + u * u;
    const WPoint wp = w_at(sl, r, rho, +1);
    push_knot(p, rho, wp.w, wp.dw, ode_d2w(rho, wp.w, wp.dw));
    u += h * r * std::sqrt(sl.q(r)) / (2.0 * std::sinh(rho));
    rho = rho_of_u(sl, u, +1);
    h = h_rule(rho, h);
  }
  for (double rr = rho_end;; rr += 0.1) {
    const bool last = rr >= rho_max;
    const double rho_k = last ? rho_max : rr;
    const WPoint wp = w_series(m, rho_k);
    push_knot(p, rho_k, wp.w, wp.dw, ode_d2w(rho_k, wp.w, wp.dw));
    if (last) break;
  }
  return p;
}

RadialProfile cap_and_dip(const RadialProfile& ext, const SeedParams& params) {
  if (ext.complete) throw std::invalid_argument("cap_and_dip: profile already complete");
  if (params.m != ext.params.m)
    throw std::invalid_argument("cap_and_dip: params.m does not match the exterior profile");
  if (params.cap_depth < 0.0 || params.cap_depth >= 1.0)
    throw std::invalid_argument("cap_and_dip: cap_depth must lie in [0,1)");
  const double m = params.m;
  const Slice sl = make_slice(m);
  const BridgeInfo b = bridge_info(m);

  RadialProfile p;
  p.params = params;
  p.complete = true;
  p.decay_amplitude = ext.decay_amplitude;
  p.support_radius = params.delta;

  double rho_core;
  double wc, dwc, d2wc, d3wc;
  std::vector<std::array<double, 4>> bridge;  // rho, w, dw, d2w (descending build)
  if (params.cap_depth > 0.0) {
    const double rho_core_target =
        b.rho_puncture + (1.0 - params.cap_depth) * (b.rho_minus - b.rho_puncture);
    // inner branch marched in the throat parameter (forward evaluations keep
    // the knot tuples consistent to rounding); spacing proportional to the
    // distance from the inner end balances interpolation bias against the
    // eps/h^2 rounding amplification of the second-derivative read
    const double h_cap = std::min(2e-3, (b.rho_h - b.rho_minus) / 16.0);
    double u = 0.0, rho = b.rho_h;
    for (;;) {
      const double r = sl.r_h + u * u;
      const WPoint wp = w_at(sl, r, rho, -1);
      bridge.push_back({rho, wp.w, wp.dw, ode_d2w(rho, wp.w, wp.dw)});
      if (rho <= rho_core_target) break;
      const double h = std::min(h_cap, std::max(0.004 * (rho - b.rho_puncture), 1e-7));
      u += h * r * std::sqrt(sl.q(r)) / (2.0 * std::sinh(rho));
      rho = rho_of_u(sl, u, -1);
    }
    rho_core = bridge.back()[0];
    wc = bridge.back()[1];
    dwc = bridge.back()[2];
    d2wc = bridge.back()[3];
    std::reverse(bridge.begin(), bridge.end());
  } else {
    rho_core = b.rho_h;
    wc = ext.w.front();
    dwc = ext.dw.front();
    d2wc = ext.d2w.front();
  }
  {
    const double ch = 1.0 / std::tanh(rho_core), sh = std::sinh(rho_core);
    d3wc = 0.75 * (5.0 * std::pow(wc, 4) - 1.0) * dwc + 2.0 / (sh * sh) * dwc - 2.0 * ch * d2wc;
  }
  const CorePoly cap = fit_core(rho_core, wc, dwc, d2wc, d3wc);

  for (int i = 0; i <= 24; ++i) {
    const double r = rho_core * i / 24.0;
    push_knot(p, r, cap.w(r), cap.dw(r), cap.d2w(r));
  }
  for (auto it = bridge.begin(); it != bridge.end(); ++it)
    if ((*it)[0] > rho_core + 1e-12) push_knot(p, (*it)[0], (*it)[1], (*it)[2], (*it)[3]);
  for (size_t i = 0; i < ext.knots.size(); ++i)
    if (ext.knots[i] > p.knots.back() + 1e-12)
      push_knot(p, ext.knots[i], ext.w[i], ext.dw[i], ext.d2w[i]);

  p.core_radius = rho_core;

  if (params.dip_amp != 0.0) {
    if (params.dip_amp < 0.0) throw std::invalid_argument("cap_and_dip: dip_amp < 0");
    if (!(params.dip_lo < params.dip_hi))
      throw std::invalid_argument("cap_and_dip: empty dip window");
    if (params.dip_lo < rho_core)
      throw std::invalid_argument("cap_and_dip: dip window overlaps the core cap");
    if (params.delta > 0.0 && params.dip_hi > params.delta)
      throw std::invalid_argument("cap_and_dip: dip window outside the support radius");
    apply_dip(p, {params.dip_amp, params.dip_lo, params.dip_hi});
  }

  for (double v : p.w)
    if (v <= 0.0) throw std::runtime_error("cap_and_dip: construction yields w <= 0");
  return p;
}

RadialProfile build_seed(const SeedParams& params, double rho_max) {
  if (params.m < 0.0) throw std::invalid_argument("build_seed: m < 0");
  if (params.m == 0.0) {
    RadialProfile p = trivial_profile(rho_max);
    p.params = params;
    p.support_radius = params.delta;
    if (params.dip_amp != 0.0) {
      if (!(params.dip_lo < params.dip_hi) || params.dip_lo <= 0.0)
        throw std::invalid_argument("build_seed: bad dip window");
      apply_dip(p, {params.dip_amp, params.dip_lo, params.dip_hi});
      for (double v : p.w)
        if (v <= 0.0) throw std::runtime_error("build_seed: dip yields w <= 0");
    }
    return p;
  }
  return cap_and_dip(ads_schw_profile(params.m, rho_max), params);
}

std::vector<double> cmc_crossings(const RadialProfile& p, double target, double lo, double hi) {
  lo = std::max(lo, std::max(p.rho_min(), 1e-6));
  hi = std::min(hi, p.rho_max());
  std::vector<double> out;
  if (!(lo < hi)) return out;
  const int n = 4000;
  double prev_rho = lo, prev_v = mean_curvature_radial(p, lo) - target;
  for (int i = 1; i <= n; ++i) {
    const double rho = lo + (hi - lo) * i / n;
    const double v = mean_curvature_radial(p, rho) - target;
    if (prev_v == 0.0) out.push_back(prev_rho);
    if (prev_v * v < 0.0) {
      double a = prev_rho, fa = prev_v, b = rho;
      for (int k = 0; k < 100; ++k) {
        const double mid = 0.5 * (a + b);
        const double fm = mean_curvature_radial(p, mid) - target;
        if (fa * fm <= 0.0)
          b = mid;
        else {
          a = mid;
          fa = fm;
        }
        if (b - a < 1e-14) break;
      }
      out.push_back(0.5 * (a + b));
    }
    prev_rho = rho;
    prev_v = v;
  }
  return out;
}

}  // namespace ahm::seed
