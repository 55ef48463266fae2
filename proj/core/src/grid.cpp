#include "ahm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "ahm/util.hpp"

namespace ahm {

PolarGrid build_grid(const GridSpec& spec, const std::vector<double>& center_abs,
                     double rho_max, const std::vector<CenterRefine>& refine) {
  if (spec.n_theta < 8) throw ConfigError("grid: n_theta >= 8 required");
  if (rho_max <= 1.0) throw ConfigError("grid: rho_max > 1 required");
  PolarGrid g;

  // fine bands around each center radius, merged
  struct Band {
    double lo, hi;
  };
  std::vector<Band> bands;
  double structured_end = 2.0;
  for (double s : center_abs) {
    bands.push_back({std::max(0.0, s - spec.fine_halfwidth), s + spec.fine_halfwidth});
    structured_end = std::max(structured_end, 2.0 * s + 3.0);
  }
  std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });

  auto target_h = [&](double rho) {
    for (const Band& b : bands)
      if (rho >= b.lo && rho <= b.hi) return spec.h_fine;
    return rho <= structured_end ? spec.h_mid : spec.h_far;
  };

  g.rho.push_back(0.0);
  double h_prev = target_h(0.0);
  while (g.rho.back() < rho_max) {
    const double rho = g.rho.back();
    // look ahead so spacing shrinks before entering a fine band
    double h = target_h(rho);
    for (const Band& b : bands)
      if (rho < b.lo && rho + 4.0 * h_prev > b.lo) h = std::min(h, std::max(spec.h_fine, (b.lo - rho) / 3.0));
    h = std::min(std::max(h, h_prev / spec.max_grade_ratio), h_prev * spec.max_grade_ratio);
    const double rem = rho_max - rho;
    if (rem <= 4.0 * h) {
      // distribute the remainder evenly so the last spacings stay graded
      const int n = std::max(1, int(std::lround(rem / h)));
      const double he = rem / n;
      for (int i = 1; i <= n; ++i) g.rho.push_back(i == n ? rho_max : rho + i * he);
      break;
    }
    g.rho.push_back(rho + h);
    h_prev = h;
  }

  // local refinement around excision radii: the base nodes inside each window
  // are replaced by a node exactly at the center with spacing h_local tapering
  // geometrically back to the surrounding spacing
  for (const CenterRefine& r : refine) {
    if (r.h_local <= 0.0 || r.at < 0.0 || r.at > rho_max || r.h_local >= spec.h_fine) continue;
    std::vector<double> taper;
    for (int sign : {-1, 1}) {
      double off = (sign < 0) ? r.h_local : 0.0, h = r.h_local;
      while (off <= r.halfwidth) {
        const double x = r.at + sign * off;
        if (x >= 0.0 && x < rho_max) taper.push_back(x);
        off += h;
        h = std::min(h * spec.max_grade_ratio, spec.h_fine);
      }
    }
    std::vector<double> merged;
    for (double x : g.rho)
      if (std::abs(x - r.at) > r.halfwidth) merged.push_back(x);
    merged.insert(merged.end(), taper.begin(), taper.end());
    std::sort(merged.begin(), merged.end());
    merged.erase(std::unique(merged.begin(), merged.end(),
                             [&](double a, double b) { return b - a < 0.25 * r.h_local; }),
                 merged.end());
    if (merged.back() != rho_max) merged.push_back(rho_max);
    g.rho = std::move(merged);
  }

  const double ht = M_PI / spec.n_theta;
  for (int k = 0; k <= spec.n_theta; ++k) g.theta.push_back(k == spec.n_theta ? M_PI : k * ht);
  return g;
}

namespace {

// ghost reflections: through the axis theta -> -theta and theta -> 2pi - theta
// are even; through the center (rho -> -rho) pairs with theta -> pi - theta.
double node_value(const ConformalField& f, long j, long k) {
  const long nt = long(f.grid.nt());
  if (k < 0) k = -k;
  if (k >= nt) k = 2 * (nt - 1) - k;
  if (j < 0) {
    j = -j;
    k = nt - 1 - k;
  }
  const long nr = long(f.grid.nr());
  if (j >= nr) throw std::domain_error("interp: rho beyond grid");
  return f.w[f.grid.idx(size_t(j), size_t(k))];
}

double grid_rho(const PolarGrid& g, long j) { return j >= 0 ? g.rho[size_t(j)] : -g.rho[size_t(-j)]; }

}  // namespace

double interp(const ConformalField& f, double rho, double theta) {
  const PolarGrid& g = f.grid;
  if (rho > g.rho.back() + 1e-12) throw std::domain_error("interp: rho beyond grid");
  rho = std::min(rho, g.rho.back());
  // wrap theta into [0, pi] by reflection
  theta = std::fmod(std::abs(theta), 2.0 * M_PI);
  if (theta > M_PI) theta = 2.0 * M_PI - theta;

  // locate rho interval
  const auto it = std::upper_bound(g.rho.begin(), g.rho.end(), rho);
  long j1 = (it == g.rho.begin()) ? 0 : long(it - g.rho.begin() - 1);
  const double ht = g.theta[1] - g.theta[0];
  long k1 = long(std::floor(theta / ht));
  k1 = std::max(0L, std::min(k1, long(g.nt()) - 2));

  // 4x4 Lagrange stencil, allowing ghost indices below/above
  long j0 = j1 - 1;
  if (j1 + 2 >= long(g.nr())) j0 = long(g.nr()) - 4;  // clamp at the outer edge
  const long k0 = k1 - 1;

  double xs[4], col[4];
  for (int a = 0; a < 4; ++a) xs[a] = grid_rho(g, j0 + a);
  auto lagrange = [](const double* x, const double* y, double t) {
    double s = 0.0;
    for (int i = 0; i < 4; ++i) {
      double li = 1.0;
      for (int m = 0; m < 4; ++m)
        if (m != i) li *= (t - x[m]) / (x[i] - x[m]);
      s += y[i] * li;
    }
    return s;
  };

  double ys[4];
  for (int b = 0; b < 4; ++b) {
    const long k = k0 + b;
    double row[4];
    for (int a = 0; a < 4; ++a) row[a] = node_value(f, j0 + a, k);
    ys[b] = lagrange(xs, row, rho);
    col[b] = g.theta[0] + ht * double(k);  // uniform theta, ghosts extend linearly
  }
  return lagrange(col, ys, theta);
}

void save_field(const std::string& path, const ConformalField& f, const std::string& header_echo) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_field: cannot open " + path);
  out << "# ahm conformal field v1 provenance " << (f.provenance.empty() ? "none" : f.provenance)
      << "\n";
  if (!header_echo.empty()) {
    out << "# config";
    for (char c : header_echo) out << (c == '\n' ? ' ' : c);
    out << "\n";
  }
  out << "# nr " << f.grid.nr() << " nt " << f.grid.nt() << "\n# rho theta w\n";
  for (size_t j = 0; j < f.grid.nr(); ++j)
    for (size_t k = 0; k < f.grid.nt(); ++k)
      out << fmt17(f.grid.rho[j]) << ' ' << fmt17(f.grid.theta[k]) << ' ' << fmt17(f.at(j, k))
          << '\n';
}

ConformalField load_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_field: cannot open " + path);
  ConformalField f;
  std::string line;
  size_t nr = 0, nt = 0;
  std::vector<double> rhos, thetas, ws;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      char prov[128];
      if (std::sscanf(line.c_str(), "# ahm conformal field v1 provenance %127s", prov) == 1)
        f.provenance = prov;
      std::sscanf(line.c_str(), "# nr %zu nt %zu", &nr, &nt);
      continue;
    }
    double r, t, w;
    if (std::sscanf(line.c_str(), "%lf %lf %lf", &r, &t, &w) == 3) {
      rhos.push_back(r);
      thetas.push_back(t);
      ws.push_back(w);
    }
  }
  if (nr == 0 || nt == 0 || ws.size() != nr * nt)
    throw std::runtime_error("load_field: malformed file " + path);
  for (size_t j = 0; j < nr; ++j) f.grid.rho.push_back(rhos[j * nt]);
  for (size_t k = 0; k < nt; ++k) f.grid.theta.push_back(thetas[k]);
  f.w = std::move(ws);
  return f;
}

void export_csv(const std::string& path, const ConformalField& f) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("export_csv: cannot open " + path);
  out << "rho,theta,w\n";
  for (size_t j = 0; j < f.grid.nr(); ++j)
    for (size_t k = 0; k < f.grid.nt(); ++k)
      out << fmt17(f.grid.rho[j]) << ',' << fmt17(f.grid.theta[k]) << ',' << fmt17(f.at(j, k))
          << '\n';
}

}  // namespace ahm
