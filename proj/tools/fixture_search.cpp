// Parameter search for the seed fixtures: scans the mass parameter, reports
// the three sphere radii, the annulus-placement window for delta, and the
// constraint bounds, then suggests config values.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "ahm/seed.hpp"

int main(int argc, char** argv) {
  double m_lo = 0.02, m_hi = 0.2, step = 0.01, tau_min = 3.0;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string k = argv[i];
    const double v = std::atof(argv[i + 1]);
    if (k == "--m-lo") m_lo = v;
    else if (k == "--m-hi") m_hi = v;
    else if (k == "--step") step = v;
    else if (k == "--tau-min") tau_min = v;
  }

  std::printf("# m rho_minus rho_h rho_plus ratio delta_window_lo delta_window_hi feasible\n");
  double best_m = 0.0, best_margin = 0.0, best_delta = 0.0;
  for (double m = m_lo; m <= m_hi + 1e-12; m += step) {
    const auto b = ahm::seed::bridge_info(m);
    const double win_lo = b.rho_plus, win_hi = 2.0 * b.rho_minus;
    // delta must satisfy placement (win_lo < delta < win_hi) and the
    // separation inequality 2 tau_min > 10 * 2 * delta
    const double delta_cap = 2.0 * tau_min / 20.0;
    const bool feasible = win_lo < win_hi && win_lo < delta_cap;
    std::printf("%.4f %.6f %.6f %.6f %.4f %.6f %.6f %d\n", m, b.rho_minus, b.rho_h, b.rho_plus,
                b.rho_plus / b.rho_minus, win_lo, std::min(win_hi, delta_cap), feasible);
    if (feasible) {
      const double hi = std::min(win_hi, delta_cap);
      const double margin = (hi - win_lo) / win_lo;
      if (margin > best_margin) {
        best_margin = margin;
        best_m = m;
        best_delta = std::sqrt(win_lo * hi);  // geometric midpoint of the window
      }
    }
  }
  if (best_m > 0.0) {
    std::printf("# suggestion: m = %.4f, delta = %.4f (window margin %.1f%%)\n", best_m,
                best_delta, 100.0 * best_margin);
    std::printf("# config lines:\n#   [seed]\n#   m = %.4f\n#   cap_depth = 0.7\n#   delta = %.4f\n",
                best_m, best_delta);
  } else {
    std::printf("# no feasible mass in the scanned range\n");
  }
  return 0;
}
