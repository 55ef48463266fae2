#include "ahm/curvature.hpp"

#include <cmath>
#include <stdexcept>

#include "ahm/hypgeom.hpp"
#include "ahm/util.hpp"

namespace ahm {

Stencil2D stencil_at(const PolarGrid& g, size_t j, size_t k) {
  if (j == 0 || j + 1 >= g.nr()) throw std::invalid_argument("stencil_at: interior rho required");
  const double rho = g.rho[j];
  const double hm = rho - g.rho[j - 1], hp = g.rho[j + 1] - rho;
  const double ht = g.theta[1] - g.theta[0];
  const double coth = 1.0 / std::tanh(rho);
  const double inv_sh2 = 1.0 / sq(std::sinh(rho));

  Stencil2D s;
  // non-uniform differences in rho:
  //   f'' ~ 2/(hm(hm+hp)) f- - 2/(hm hp) f0 + 2/(hp(hm+hp)) f+
  //   f'  ~ -hp/(hm(hm+hp)) f- + (hp-hm)/(hm hp) f0 + hm/(hp(hm+hp)) f+
  s.rm = 2.0 / (hm * (hm + hp)) + 2.0 * coth * (-hp / (hm * (hm + hp)));
  s.rp = 2.0 / (hp * (hm + hp)) + 2.0 * coth * (hm / (hp * (hm + hp)));
  s.c = -2.0 / (hm * hp) + 2.0 * coth * ((hp - hm) / (hm * hp));

  // angular part (1/sinh^2)(f_tt + cot f_t); axis rows via even reflection
  const bool axis_lo = (k == 0), axis_hi = (k + 1 == g.nt());
  if (axis_lo || axis_hi) {
    // f_tt + cot f_t -> 2 f_tt at the axis; reflected neighbor doubles
    const double w = inv_sh2 * 4.0 / (ht * ht);
    if (axis_lo)
      s.tp += w;
    else
      s.tm += w;
    s.c -= w;
  } else {
    const double cot = std::cos(g.theta[k]) / std::sin(g.theta[k]);
    s.tm += inv_sh2 * (1.0 / (ht * ht) - cot / (2.0 * ht));
    s.tp += inv_sh2 * (1.0 / (ht * ht) + cot / (2.0 * ht));
    s.c += inv_sh2 * (-2.0 / (ht * ht));
  }
  return s;
}

std::vector<double> laplacian_h3(const PolarGrid& g, const std::vector<double>& f) {
  if (f.size() != g.size()) throw std::invalid_argument("laplacian_h3: size mismatch");
  std::vector<double> out(f.size(), 0.0);
  const size_t nt = g.nt();

  // center value: spherical mean over the first ring, in difference form so
  // constants map to exactly zero
  {
    const double f0 = f[g.idx(0, 0)];  // the center row is one physical point
    double diff = 0.0, wsum0 = 0.0;
    for (size_t k = 0; k < nt; ++k) {
      const double wq = (k == 0 || k + 1 == nt) ? 0.5 : 1.0;  // trapezoid
      const double wt = wq * std::sin(g.theta[k]);
      diff += wt * (f[g.idx(1, k)] - f0);
      wsum0 += wt;
    }
    const double h1 = g.rho[1];
    const double lap0 = 6.0 * (diff / wsum0) / (h1 * h1);
    for (size_t k = 0; k < nt; ++k) out[g.idx(0, k)] = lap0;
  }

  for (size_t j = 1; j + 1 < g.nr(); ++j) {
    for (size_t k = 0; k < nt; ++k) {
      const Stencil2D s = stencil_at(g, j, k);
      const double fm = f[g.idx(j - 1, k)], fp = f[g.idx(j + 1, k)], f0 = f[g.idx(j, k)];
      const double ftm = (k == 0) ? f[g.idx(j, 1)] : f[g.idx(j, k - 1)];
      const double ftp = (k + 1 == nt) ? f[g.idx(j, nt - 2)] : f[g.idx(j, k + 1)];
      // difference form: exact on constants (the center coefficient equals
      // minus the sum of the others algebraically)
      out[g.idx(j, k)] =
          s.rm * (fm - f0) + s.rp * (fp - f0) + s.tm * (ftm - f0) + s.tp * (ftp - f0);
    }
  }

  // outer edge: copy the adjacent interior value (callers treat the edge as
  // boundary data; kept finite for reporting)
  for (size_t k = 0; k < nt; ++k) out[g.idx(g.nr() - 1, k)] = out[g.idx(g.nr() - 2, k)];
  return out;
}

std::vector<double> scalar_curvature_stencil(const PolarGrid& g, const std::vector<double>& w) {
  for (double v : w)
    if (v <= 0.0) throw std::domain_error("scalar_curvature_stencil: w <= 0");
  std::vector<double> lap = laplacian_h3(g, w);
  std::vector<double> R(w.size());
  for (size_t i = 0; i < w.size(); ++i) {
    const double w5 = w[i] * w[i] * w[i] * w[i] * w[i];
    R[i] = (-8.0 * lap[i] - 6.0 * w[i]) / w5;
  }
  return R;
}

double mean_curvature_sphere(const FieldEvaluator& f, double s, double r, double omega,
                             double fd_step) {
  if (r <= 0.0) throw std::domain_error("mean_curvature_sphere: r <= 0");
  auto val = [&](double rr) {
    const auto [rho, th] = from_axis_polar(s, rr, omega);
    return f.value(rho, th);
  };
  const double w = val(r);
  if (w <= 0.0) throw std::domain_error("mean_curvature_sphere: w <= 0");
  const double dw = (val(r + fd_step) - val(r - fd_step)) / (2.0 * fd_step);
  return 2.0 / std::tanh(r) / (w * w) + 4.0 * dw / (w * w * w);
}

}  // namespace ahm
