#pragma once

#include <cstdint>
#include <vector>

#include "ahm/curvature.hpp"
#include "ahm/glue.hpp"
#include "ahm/grid.hpp"

namespace ahm {

struct SolveSettings {
  std::vector<double> exhaustion_radii;  // increasing, first >= 3 tau; empty -> default
  double newton_tol = 1e-9;              // residual sup norm
  int max_newton = 30;
  double cg_tol = 1e-11;                 // relative
  int max_cg = 200000;
  double cauchy_tol = 1e-8;
  double damping_floor = 1e-9;
};

/// Sub/super-solution envelope 1 -+ lambda e^{-3 rho}.
struct Barrier {
  double lambda = 0.0;
  double rho_bar = 0.0;
  static Barrier standard(double rho_bar) { return {std::exp(3.0 * rho_bar), rho_bar}; }
};

struct SolveResult {
  ConformalField w;                       // composite factor, "solved"
  ConformalField u;                       // w / w~
  std::vector<std::uint8_t> pinned;       // per node: held at u = 1
  std::vector<double> residual_history;   // sup|G| per accepted Newton iterate
  std::vector<double> exhaustion_diffs;   // successive solution differences
  std::vector<double> exhaustion_radii;   // snapped radii actually used
  double sup_dev = 0.0;                   // sup |u - 1| over active nodes
  double min_w = 0.0;
  double final_residual = 0.0;
  int newton_iterations = 0;
  // the residual readout floors at the coefficient-interpolation noise; the
  // iterate is then accepted once the Newton increment drops below 0.1 tol
  bool increment_converged = false;
};

/// Newton solve of the conformal equation on the ball rho <= rho_i with u = 1
/// Dirichlet data (composite boundary value w = w~) and u = 1 pinned inside
/// the seed cores. Returns the u field; throws SolveError on non-convergence.
std::vector<double> solve_dirichlet(const GluedField& gf, const PolarGrid& grid, double rho_i,
                                    const SolveSettings& settings,
                                    std::vector<double>* residual_history = nullptr,
                                    int* iterations = nullptr);

/// Exhaustion over the Dirichlet balls with Cauchy stopping.
SolveResult exhaust(const GluedField& gf, const PolarGrid& grid, SolveSettings settings);

/// Discrete residual sup-norm of the u-form equation for given node values
/// (solver-consistent operator; pinned/boundary nodes excluded).
double residual_sup(const GluedField& gf, const PolarGrid& grid,
                    const std::vector<double>& u, double rho_i);

/// Discrete scalar-curvature defect sup |R + 6| = sup |8 G(u) / u^5| of the
/// solved field on the solver's own operator.
double solved_defect_sup(const GluedField& gf, const PolarGrid& grid,
                         const std::vector<double>& u, double rho_i);

struct BarrierReport {
  bool holds = false;
  double worst_margin = 0.0;  // min over checked nodes of envelope - |v-1|
  double worst_rho = 0.0, worst_theta = 0.0;
  double lf_minus_min = 0.0;  // min L(f-) over the sampled range
  double lf_plus_max = 0.0;   // max L(f+)
  bool coth_inequality_ok = false;
};

/// Envelope check |v - 1| <= lambda e^{-3 rho_amb} for rho_amb >= rho_bar,
/// rho_amb measured from the ambient center (last config center), v the
/// composite factor; plus the closed-form differential checks.
BarrierReport barrier_check(const SolveResult& result, const GluedField& gf,
                            const Barrier& barrier);

/// Closed forms L(f_-+) = Delta f - (3/4) f (f^4 - 1) for f = 1 -+ lambda e^{-3 rho}.
double barrier_lf_minus(double rho, double lambda);
double barrier_lf_plus(double rho, double lambda);

/// Independent evaluation of the u-form residual with stencil u-derivatives
/// and exact glued coefficients; values on all nodes (edges zero-filled).
std::vector<double> residual_eq31(const ConformalField& u, const GluedField& gf);

/// Composite-field evaluator u_interp * w_exact with u = 1 beyond the grid.
class SolvedField : public FieldEvaluator {
 public:
  SolvedField(const ConformalField& u, const GluedField& gf) : u_(&u), gf_(&gf) {}
  double value(double rho, double theta) const override;

 private:
  const ConformalField* u_;
  const GluedField* gf_;
};

}  // namespace ahm
