#include "ahm/radial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace ahm {

namespace {

// Quintic Hermite basis on [0,1]: value/first/second derivative match at both
// ends. p(t) = w0 B0 + h d0 B1 + h^2 s0 B2 + w1 B3 + h d1 B4 + h^2 s1 B5.
struct Basis {
  double b[6];
};

// B0 is the exact complement of B3 (so constant data reproduces exactly).
Basis basis_val(double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
  const double b3 = 10 * t3 - 15 * t4 + 6 * t5;
  return {{1.0 - b3, t - 6 * t3 + 8 * t4 - 3 * t5, 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5,
           b3, -4 * t3 + 7 * t4 - 3 * t5, 0.5 * t3 - t4 + 0.5 * t5}};
}
Basis basis_d1(double t) {
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t;
  const double d3 = 30 * t2 - 60 * t3 + 30 * t4;
  return {{-d3, 1 - 18 * t2 + 32 * t3 - 15 * t4, t - 4.5 * t2 + 6 * t3 - 2.5 * t4, d3,
           -12 * t2 + 28 * t3 - 15 * t4, 1.5 * t2 - 4 * t3 + 2.5 * t4}};
}
Basis basis_d2(double t) {
  const double t2 = t * t, t3 = t2 * t;
  const double d3 = 60 * t - 180 * t2 + 120 * t3;
  return {{-d3, -36 * t + 96 * t2 - 60 * t3, 1 - 9 * t + 18 * t2 - 10 * t3, d3,
           -24 * t + 84 * t2 - 60 * t3, 3 * t - 12 * t2 + 10 * t3}};
}

}  // namespace

RadialEval eval(const RadialProfile& p, double rho) {
  if (p.knots.empty()) throw std::invalid_argument("eval: empty profile");
  if (rho > p.rho_max()) {
    // fitted tail 1 + A e^{-3 rho}
    const double e = std::exp(-3.0 * rho);
    return {1.0 + p.decay_amplitude * e, -3.0 * p.decay_amplitude * e,
            9.0 * p.decay_amplitude * e};
  }
  if (rho < p.rho_min() - 1e-12)
    throw std::domain_error("eval: rho below profile domain");
  rho = std::max(rho, p.rho_min());
  auto it = std::upper_bound(p.knots.begin(), p.knots.end(), rho);
  size_t i = (it == p.knots.begin()) ? 0 : (it - p.knots.begin() - 1);
  if (i + 1 >= p.knots.size()) i = p.knots.size() - 2;
  const double x0 = p.knots[i], x1 = p.knots[i + 1], h = x1 - x0;
  const double t = (rho - x0) / h;
  // deviation-from-linear form: with B0 + B3 = 1 and B1 + B3 + B4 = t exactly,
  //   p = w0 + h d0 t + dw B3 + h dd B4 + h^2 (s0 B2 + s1 B5),
  // where dw = w1 - w0 - h d0 and dd = d1 - d0 are curvature-scale residuals.
  // Every rounding contribution to the derivative reads then scales with w''
  // instead of w/h^2 or w'/h.
  const double dw = p.w[i + 1] - p.w[i] - h * p.dw[i];
  const double dd = p.dw[i + 1] - p.dw[i];
  const double s0 = h * h * p.d2w[i], s1 = h * h * p.d2w[i + 1];
  const Basis bv = basis_val(t), b1 = basis_d1(t), b2 = basis_d2(t);
  const double val =
      p.w[i] + h * p.dw[i] * t + dw * bv.b[3] + h * dd * bv.b[4] + s0 * bv.b[2] + s1 * bv.b[5];
  const double d1 = p.dw[i] + (dw * b1.b[3] + h * dd * b1.b[4] + s0 * b1.b[2] + s1 * b1.b[5]) / h;
  const double d2 =
      (dw * b2.b[3] + h * dd * b2.b[4] + s0 * b2.b[2] + s1 * b2.b[5]) / (h * h);
  return {val, d1, d2};
}

double laplacian_radial(const RadialProfile& p, double rho) {
  const RadialEval e = eval(p, rho);
  if (rho < 1e-8) {
    if (!p.complete) throw std::domain_error("laplacian_radial: rho=0 on exterior profile");
    return 3.0 * e.d2w;  // w'(0) = 0, 2 coth(rho) w' -> 2 w''(0)
  }
  return e.d2w + 2.0 / std::tanh(rho) * e.dw;
}

double scalar_curvature_radial(const RadialProfile& p, double rho) {
  const RadialEval e = eval(p, rho);
  if (e.w <= 0.0) throw std::domain_error("scalar_curvature_radial: w <= 0");
  const double lap = laplacian_radial(p, rho);
  const double w5 = e.w * e.w * e.w * e.w * e.w;
  return (-8.0 * lap - 6.0 * e.w) / w5;
}

double mean_curvature_radial(const RadialProfile& p, double rho) {
  if (rho <= 0.0) throw std::domain_error("mean_curvature_radial: rho <= 0");
  const RadialEval e = eval(p, rho);
  if (e.w <= 0.0) throw std::domain_error("mean_curvature_radial: w <= 0");
  return 2.0 / std::tanh(rho) / (e.w * e.w) + 4.0 * e.dw / (e.w * e.w * e.w);
}

LineFit decay_fit(const RadialProfile& p, double lo, double hi) {
  std::vector<double> xs, ys;
  for (size_t i = 0; i < p.knots.size(); ++i) {
    const double rho = p.knots[i];
    if (rho < lo || rho > hi) continue;
    const double d = std::abs(p.w[i] - 1.0);
    if (d < 1e-300) continue;
    xs.push_back(rho);
    ys.push_back(std::log(d));
  }
  return fit_line(xs, ys);
}

void save_profile(const std::string& path, const RadialProfile& p) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_profile: cannot open " + path);
  out << "# ahm radial profile v1\n";
  out << "# m " << fmt17(p.params.m) << " cap_depth " << fmt17(p.params.cap_depth) << " dip_amp "
      << fmt17(p.params.dip_amp) << " dip_lo " << fmt17(p.params.dip_lo) << " dip_hi "
      << fmt17(p.params.dip_hi) << " delta " << fmt17(p.params.delta) << "\n";
  out << "# A " << fmt17(p.decay_amplitude) << " support_radius " << fmt17(p.support_radius)
      << " core_radius " << fmt17(p.core_radius) << " complete " << (p.complete ? 1 : 0) << "\n";
  out << "# rho w dw d2w\n";
  for (size_t i = 0; i < p.knots.size(); ++i)
    out << fmt17(p.knots[i]) << ' ' << fmt17(p.w[i]) << ' ' << fmt17(p.dw[i]) << ' '
        << fmt17(p.d2w[i]) << '\n';
}

RadialProfile load_profile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_profile: cannot open " + path);
  RadialProfile p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      char key[32];
      if (std::sscanf(line.c_str(), "# m %lf cap_depth %lf dip_amp %lf dip_lo %lf dip_hi %lf delta %lf",
                      &p.params.m, &p.params.cap_depth, &p.params.dip_amp, &p.params.dip_lo,
                      &p.params.dip_hi, &p.params.delta) == 6)
        continue;
      int comp = 0;
      if (std::sscanf(line.c_str(), "# A %lf support_radius %lf core_radius %lf complete %d",
                      &p.decay_amplitude, &p.support_radius, &p.core_radius, &comp) == 4) {
        p.complete = comp != 0;
        continue;
      }
      (void)key;
      continue;
    }
    double r, w, dw, d2w;
    if (std::sscanf(line.c_str(), "%lf %lf %lf %lf", &r, &w, &dw, &d2w) == 4) {
      p.knots.push_back(r);
      p.w.push_back(w);
      p.dw.push_back(dw);
      p.d2w.push_back(d2w);
    }
  }
  if (p.knots.empty()) throw std::runtime_error("load_profile: no samples in " + path);
  return p;
}

}  // namespace ahm
