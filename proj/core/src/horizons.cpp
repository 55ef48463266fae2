#include "ahm/horizons.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ahm/seed.hpp"
#include "ahm/util.hpp"

namespace ahm {

namespace {

double h_at(const FieldEvaluator& f, double s, double r, double omega, double fd) {
  return mean_curvature_sphere(f, s, r, omega, fd);
}

double bisect_crossing(const FieldEvaluator& f, double s, double omega, double target, double a,
                       double b, double fa, const HorizonOptions& opt) {
  for (int i = 0; i < 200 && b - a > opt.bisect_tol; ++i) {
    const double mid = 0.5 * (a + b);
    const double fm = h_at(f, s, mid, omega, opt.fd_step) - target;
    if (fa * fm <= 0.0)
      b = mid;
    else {
      a = mid;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

std::vector<std::vector<double>> h_profile(const FieldEvaluator& f, double s_center,
                                           const std::vector<double>& radii, int n_omega,
                                           double fd_step) {
  std::vector<std::vector<double>> table;
  table.reserve(radii.size());
  for (double r : radii) {
    std::vector<double> row(n_omega);
    for (int i = 0; i < n_omega; ++i) {
      const double omega = (n_omega == 1) ? 0.0 : M_PI * i / (n_omega - 1);
      row[i] = h_at(f, s_center, r, omega, fd_step);
    }
    table.push_back(std::move(row));
  }
  return table;
}

std::vector<CrossingRecord> find_cmc(const FieldEvaluator& f, double s_center, double target,
                                     double lo, double hi, const HorizonOptions& opt) {
  if (!(lo > 0.0 && lo < hi)) throw std::invalid_argument("find_cmc: bad scan range");
  const int n_omega = opt.n_omega;
  const int n_scan = std::max(32, opt.scan_points);

  // per-direction crossing lists
  std::vector<std::vector<double>> per_dir(n_omega);
  double h_min = 1e300, h_max = -1e300;
  for (int i = 0; i < n_omega; ++i) {
    const double omega = (n_omega == 1) ? 0.0 : M_PI * i / (n_omega - 1);
    double prev_r = lo, prev_v = h_at(f, s_center, lo, omega, opt.fd_step) - target;
    h_min = std::min(h_min, prev_v + target);
    h_max = std::max(h_max, prev_v + target);
    for (int j = 1; j <= n_scan; ++j) {
      const double r = lo + (hi - lo) * j / n_scan;
      const double v = h_at(f, s_center, r, omega, opt.fd_step) - target;
      h_min = std::min(h_min, v + target);
      h_max = std::max(h_max, v + target);
      if (prev_v == 0.0 || prev_v * v < 0.0)
        per_dir[i].push_back(bisect_crossing(f, s_center, omega, target, prev_r, r, prev_v, opt));
      prev_r = r;
      prev_v = v;
    }
  }

  // cluster the union of crossings by radial gaps
  std::vector<double> all;
  for (const auto& v : per_dir) all.insert(all.end(), v.begin(), v.end());
  std::vector<CrossingRecord> out;
  if (all.empty()) {
    CrossingRecord rec;
    rec.target = target;
    rec.found = false;
    rec.scan_lo = lo;
    rec.scan_hi = hi;
    rec.h_min = h_min;
    rec.h_max = h_max;
    out.push_back(rec);
    return out;
  }
  std::sort(all.begin(), all.end());
  const double gap = std::max((hi - lo) / 50.0, 20.0 * opt.bisect_tol);
  std::vector<std::pair<double, double>> clusters;  // [lo, hi] in radius
  double c_lo = all.front(), c_hi = all.front();
  for (double r : all) {
    if (r - c_hi > gap) {
      clusters.push_back({c_lo, c_hi});
      c_lo = r;
    }
    c_hi = r;
  }
  clusters.push_back({c_lo, c_hi});

  for (const auto& [cl, ch] : clusters) {
    CrossingRecord rec;
    rec.target = target;
    rec.scan_lo = lo;
    rec.scan_hi = hi;
    rec.h_min = h_min;
    rec.h_max = h_max;
    rec.radii.assign(n_omega, 0.0);
    bool complete = true;
    for (int i = 0; i < n_omega; ++i) {
      double best = 0.0, err = 1e300;
      for (double r : per_dir[i]) {
        if (r >= cl - gap && r <= ch + gap && std::abs(r - 0.5 * (cl + ch)) < err) {
          err = std::abs(r - 0.5 * (cl + ch));
          best = r;
        }
      }
      if (err == 1e300) {
        complete = false;
        break;
      }
      rec.radii[i] = best;
    }
    if (!complete) continue;  // partial crossings are not a surface
    rec.found = true;
    const auto [mn, mx] = std::minmax_element(rec.radii.begin(), rec.radii.end());
    rec.roundness = *mx - *mn;
    rec.mean_radius = 0.0;
    for (double r : rec.radii) rec.mean_radius += r;
    rec.mean_radius /= n_omega;

    // uniform bracketing certificate; the pad clears both the angular spread
    // and the finite-difference noise of the H samples
    const double pad =
        std::max({2.0 * rec.roundness, 1e-4 * rec.mean_radius, 100.0 * opt.bisect_tol});
    rec.bracket_lo = std::max(lo, *mn - pad);
    rec.bracket_hi = std::min(hi, *mx + pad);
    int sign_lo = 0, sign_hi = 0;
    bool uniform = true;
    for (int i = 0; i < n_omega && uniform; ++i) {
      const double omega = (n_omega == 1) ? 0.0 : M_PI * i / (n_omega - 1);
      const double vlo = h_at(f, s_center, rec.bracket_lo, omega, opt.fd_step) - target;
      const double vhi = h_at(f, s_center, rec.bracket_hi, omega, opt.fd_step) - target;
      const int sl = (vlo > 0) - (vlo < 0), sh = (vhi > 0) - (vhi < 0);
      if (sl == 0 || sh == 0 || sl == sh) uniform = false;
      if (i == 0) {
        sign_lo = sl;
        sign_hi = sh;
      } else if (sl != sign_lo || sh != sign_hi) {
        uniform = false;
      }
    }
    rec.certified = uniform;
    out.push_back(std::move(rec));
  }
  if (out.empty()) {
    CrossingRecord rec;
    rec.target = target;
    rec.found = false;
    rec.scan_lo = lo;
    rec.scan_hi = hi;
    rec.h_min = h_min;
    rec.h_max = h_max;
    out.push_back(rec);
  }
  return out;
}

namespace {

// scan window from the seed's own radial crossings
std::pair<double, double> scan_range(const GluedField& gf, size_t c) {
  const GlueConfig& cfg = gf.config();
  const RadialProfile& p = cfg.profiles[c];
  const double pin = gf.pin_radius(c);
  double lo = std::max(1.02 * pin, 1e-3);
  const double cap = (cfg.num_centers() > 1) ? gf.window_lo(c) - 0.5
                                             : std::max(2.0, p.rho_max() - 2.0);
  const double probe_hi = std::min(cap, std::max(4.0 * cfg.deltas[c], 6.0));
  double hi = std::min(probe_hi, std::max(2.0, 4.0 * cfg.deltas[c]));
  const auto minus = seed::cmc_crossings(p, -2.0, lo, probe_hi);
  const auto plus = seed::cmc_crossings(p, 2.0, lo, probe_hi);
  if (!minus.empty()) lo = std::max(lo, 0.55 * minus.front());
  if (!plus.empty()) hi = std::min(std::max(hi, 1.35 * plus.back()), cap);
  return {lo, std::max(hi, lo * 1.5)};
}

int pick_primary(const std::vector<CrossingRecord>& recs, double delta) {
  int primary = -1;
  for (size_t i = 0; i < recs.size(); ++i) {
    if (!recs[i].found) continue;
    if (delta > 0.0 && recs[i].mean_radius > delta / 2.0 && recs[i].mean_radius < delta)
      return int(i);  // the surface in the placement annulus
    primary = int(i);  // otherwise the outermost
  }
  return primary;
}

}  // namespace

HorizonReport find_horizons(const FieldEvaluator& f, const GluedField& gf,
                            const HorizonOptions& opt) {
  const GlueConfig& cfg = gf.config();
  HorizonReport rep;
  for (size_t c = 0; c < cfg.num_centers(); ++c) {
    CenterReport cr;
    cr.center = c;
    cr.delta = cfg.deltas[c];
    const auto [lo, hi] = scan_range(gf, c);
    cr.scan_lo = lo;
    cr.scan_hi = hi;
    const double s = cfg.centers[c];
    cr.minus2 = find_cmc(f, s, -2.0, lo, hi, opt);
    cr.zero = find_cmc(f, s, 0.0, lo, hi, opt);
    cr.plus2 = find_cmc(f, s, 2.0, lo, hi, opt);
    cr.primary_minus2 = pick_primary(cr.minus2, cr.delta);
    cr.primary_zero = pick_primary(cr.zero, cr.delta);
    cr.primary_plus2 = pick_primary(cr.plus2, cr.delta);
    cr.all_found = cr.primary_minus2 >= 0 && cr.primary_zero >= 0 && cr.primary_plus2 >= 0;
    if (cr.all_found) {
      const double rm = cr.minus2[cr.primary_minus2].mean_radius;
      const double r0 = cr.zero[cr.primary_zero].mean_radius;
      const double rp = cr.plus2[cr.primary_plus2].mean_radius;
      cr.nested = rm < r0 && r0 < rp;
      cr.annulus_ok = cr.delta > 0.0 && rm > cr.delta / 2.0 && rp < cr.delta;
      cr.placement_ok = cr.delta > 0.0;
      for (const auto* list : {&cr.minus2, &cr.zero, &cr.plus2})
        for (const auto& rec : *list)
          if (rec.found)
            for (double r : rec.radii)
              if (r >= cr.delta) cr.placement_ok = false;
    }
    rep.centers.push_back(std::move(cr));
  }

  // family disjointness: surfaces around distinct centers stay separated
  rep.families_disjoint = true;
  rep.min_family_separation = 1e300;
  for (size_t a = 0; a < rep.centers.size(); ++a)
    for (size_t b = a + 1; b < rep.centers.size(); ++b) {
      double ra = 0.0, rb = 0.0;
      for (const auto* list : {&rep.centers[a].minus2, &rep.centers[a].zero, &rep.centers[a].plus2})
        for (const auto& rec : *list)
          if (rec.found) ra = std::max(ra, rec.mean_radius + rec.roundness);
      for (const auto* list : {&rep.centers[b].minus2, &rep.centers[b].zero, &rep.centers[b].plus2})
        for (const auto& rec : *list)
          if (rec.found) rb = std::max(rb, rec.mean_radius + rec.roundness);
      if (ra == 0.0 || rb == 0.0) continue;
      const double d = std::abs(cfg.centers[a] - cfg.centers[b]) - ra - rb;
      rep.min_family_separation = std::min(rep.min_family_separation, d);
      if (d <= 0.0) rep.families_disjoint = false;
    }
  if (rep.min_family_separation == 1e300) rep.min_family_separation = 0.0;
  return rep;
}

std::vector<Displacement> persistence(const FieldEvaluator& before, const FieldEvaluator& after,
                                      const GluedField& gf, const HorizonOptions& opt) {
  const HorizonReport rb = find_horizons(before, gf, opt);
  const HorizonReport ra = find_horizons(after, gf, opt);
  std::vector<Displacement> out;
  for (size_t c = 0; c < rb.centers.size(); ++c) {
    const CenterReport& b = rb.centers[c];
    const CenterReport& a = ra.centers[c];
    const int tb[3] = {b.primary_minus2, b.primary_zero, b.primary_plus2};
    const int ta[3] = {a.primary_minus2, a.primary_zero, a.primary_plus2};
    const std::vector<CrossingRecord>* lb[3] = {&b.minus2, &b.zero, &b.plus2};
    const std::vector<CrossingRecord>* la[3] = {&a.minus2, &a.zero, &a.plus2};
    const double targets[3] = {-2.0, 0.0, 2.0};
    for (int t = 0; t < 3; ++t) {
      Displacement d;
      d.center = c;
      d.target = targets[t];
      d.persisted = tb[t] >= 0 && ta[t] >= 0;
      if (d.persisted) {
        d.before = (*lb[t])[tb[t]].mean_radius;
        d.after = (*la[t])[ta[t]].mean_radius;
        d.shift = std::abs(d.after - d.before);
      }
      out.push_back(d);
    }
  }
  return out;
}

}  // namespace ahm
