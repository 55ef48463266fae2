#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace ahm {

/// Tensor grid on [0, rho_max] x [0, pi]; rho graded, theta uniform.
struct PolarGrid {
  std::vector<double> rho;    // ascending, rho.front() == 0
  std::vector<double> theta;  // uniform including both endpoints

  size_t nr() const { return rho.size(); }
  size_t nt() const { return theta.size(); }
  size_t idx(size_t j, size_t k) const { return j * nt() + k; }
  size_t size() const { return nr() * nt(); }
};

struct GridSpec {
  int n_theta = 128;          // cells; nodes = n_theta + 1
  double h_fine = 0.02;       // spacing near the center radii
  double h_mid = 0.05;        // spacing elsewhere in the structured region
  double h_far = 0.08;        // far-field spacing
  double fine_halfwidth = 1.8;
  double max_grade_ratio = 1.12;
};

/// Extra local refinement: a node exactly at `at` with spacing `h_local`
/// tapering back to the surrounding spacing (used to resolve excision radii
/// much smaller than h_fine).
struct CenterRefine {
  double at;
  double h_local;
  double halfwidth;
};

/// Graded grid with fine bands around each |s_k| (center radii in the
/// midpoint chart) and smooth spacing transitions.
PolarGrid build_grid(const GridSpec& spec, const std::vector<double>& center_abs,
                     double rho_max, const std::vector<CenterRefine>& refine = {});

/// Axisymmetric grid sample of a conformal factor.
struct ConformalField {
  PolarGrid grid;
  std::vector<double> w;  // node-ordered, idx(j,k)
  std::string provenance; // "glued", "solved", ...

  double& at(size_t j, size_t k) { return w[grid.idx(j, k)]; }
  double at(size_t j, size_t k) const { return w[grid.idx(j, k)]; }
};

/// Local bicubic (4x4 Lagrange) interpolation with reflection ghosts across
/// the axis (theta in {0, pi}) and through the center (rho = 0).
double interp(const ConformalField& f, double rho, double theta);

/// Columnar text (rho theta w) with provenance header; CSV export for plots.
void save_field(const std::string& path, const ConformalField& f,
                const std::string& header_echo = "");
ConformalField load_field(const std::string& path);
void export_csv(const std::string& path, const ConformalField& f);

}  // namespace ahm
