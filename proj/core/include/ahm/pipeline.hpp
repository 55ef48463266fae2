#pragma once

#include <string>
#include <vector>

#include "ahm/glue.hpp"
#include "ahm/grid.hpp"
#include "ahm/horizons.hpp"
#include "ahm/mass.hpp"
#include "ahm/radial.hpp"
#include "ahm/yamabe.hpp"

namespace ahm {

/// One pipeline run: seeds, gluing, solve, horizons, mass.
struct RunConfig {
  int schema = 1;
  int K = 1;
  double tau = 4.0;
  GlueMode mode = GlueMode::Superposition;
  bool symmetrize = true;   // symmetry projection for symmetric two-center runs
  double rho_bar = 0.0;     // 0 -> default 3 tau + 2 (multi) or rho_max - 4
  double c_cal = 0.0;       // 0 -> calibrate at run time
  double rho_max = 0.0;     // 0 -> 3 tau + 4 (multi) or 14
  std::vector<SeedParams> seeds;  // one entry used for all centers if size 1
  GridSpec grid;
  SolveSettings solve;
  HorizonOptions horizons;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);
std::string config_echo(const RunConfig& cfg);

/// Exit codes: 0 ok, 2 invariant failure, 3 solver non-convergence, 4 config.
struct CheckResult {
  std::string name;
  bool ok = true;
  bool hard = false;
  double value = 0.0;
  std::string note;
};

struct PipelineResult {
  int exit_code = 0;
  std::vector<CheckResult> checks;
  // headline numbers
  double defect_annulus = 0.0;       // glued-field curvature defect, annulus max
  double defect_exact_zone = 0.0;
  double solved_defect = 0.0;        // discrete |R + 6| of the solved field
  double sup_dev = 0.0;              // sup |u - 1|
  double mass = 0.0;
  double decay_slope_min = 0.0, decay_slope_max = 0.0;
  double barrier_margin = 0.0;
  double aspect_asym_raw = 0.0;      // before the symmetry projection
  std::vector<Displacement> displacements;
  HorizonReport horizons;
  std::string summary_json;
};

/// Runs the pipeline; writes field files, reports and summary.json under
/// out_dir when non-empty. Deterministic for a fixed config.
PipelineResult run_pipeline(const RunConfig& cfg, const std::string& out_dir,
                            bool quiet = true);

struct SweepRow {
  double tau = 0.0;
  bool ok = false;
  double defect_annulus = 0.0;
  double sup_dev = 0.0;
  double disp_minus2 = 0.0, disp_zero = 0.0, disp_plus2 = 0.0;
  double mass = 0.0;
};

struct SweepResult {
  int exit_code = 0;
  std::vector<SweepRow> rows;
  double slope_defect = 0.0;   // fitted d ln(defect) / d tau
  double slope_supdev = 0.0;
  double slope_disp = 0.0;     // H = 0 displacement slope
  bool slopes_valid = false;   // false when the signals sit at roundoff
  std::string csv;
};

SweepResult sweep_tau(RunConfig cfg, const std::vector<double>& taus,
                      const std::string& out_dir, bool quiet = true);

struct RefineRow {
  int level = 0;
  size_t nodes = 0;
  double eq31_sup = 0.0;       // independent u-form residual, smooth zone
  double stencil_defect_err = 0.0;  // stencil vs exact curvature on the glued field
  double horizon_rho0 = 0.0;   // primary H=0 radius, first center
  double probe_change = 0.0;   // solution change against the previous level
};

struct RefineResult {
  int exit_code = 0;
  std::vector<RefineRow> rows;
  double order_probe = 0.0;    // observed order from probe changes
  double order_stencil = 0.0;  // observed order of the stencil curvature error
  std::string csv;
};

/// Grid-refinement study; levels >= 2; level i halves the level-(i-1) spacings.
/// mms = true replaces the solve by the manufactured field w = 1 + e^{-3 rho}.
RefineResult refine_study(RunConfig cfg, int levels, bool mms, const std::string& out_dir,
                          bool quiet = true, size_t node_budget = 4000000);

}  // namespace ahm
