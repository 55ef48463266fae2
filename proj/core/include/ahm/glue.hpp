#pragma once

#include <memory>
#include <vector>

#include "ahm/grid.hpp"
#include "ahm/radial.hpp"

namespace ahm {

enum class GlueMode {
  ThreeZone,      // pairwise form: pulled-back seed inside B_p(tau+1), blend on
                  // the annulus, ambient seed outside (K = 2 only)
  Superposition,  // w = 1 + sum_k eta_k (phi_k - 1); reflection-symmetric
};

/// Multi-center configuration on a common axis through the chart midpoint.
struct GlueConfig {
  std::vector<double> centers;          // signed arclengths s_k; K = 2 uses {+tau, -tau}
  double tau = 0.0;                     // half of the minimal pairwise separation
  std::vector<RadialProfile> profiles;  // one per center, complete
  std::vector<double> deltas;           // per-center support radius
  GlueMode mode = GlueMode::Superposition;

  size_t num_centers() const { return centers.size(); }
};

/// Throws ConfigError naming the violated inequality.
void validate(const GlueConfig& cfg);

/// C2 cutoff: 1 for s <= a, 0 for s >= b, quintic smoothstep between;
/// |eta''| <= 60/(b-a)^2.
double cutoff_eta(double s, double a, double b);
double cutoff_eta_d1(double s, double a, double b);
double cutoff_eta_d2(double s, double a, double b);

/// Pointwise data of the glued factor, computed from profile derivatives and
/// closed-form chart geometry (no grid stencils).
struct GlueEval {
  double w = 1.0;
  double d_rho = 0.0, d_theta = 0.0;  // chart partials
  double lap = 0.0;                   // hyperbolic Laplacian
  double R = -6.0;                    // scalar curvature of w^4 * hyperbolic
};

class GluedField {
 public:
  explicit GluedField(GlueConfig cfg);

  double value(double rho, double theta) const;
  GlueEval full(double rho, double theta) const;

  /// distance to center k
  double center_dist(size_t k, double rho, double theta) const;
  /// radial derivative along the ray from center k (exact chain rule)
  double radial_derivative(size_t k, double rho, double theta) const;

  /// per-center cutoff window start (tau_k + 1, tau_k + 2)
  double window_lo(size_t k) const { return half_sep_[k] + 1.0; }
  double window_hi(size_t k) const { return half_sep_[k] + 2.0; }
  /// pin radius: max(delta/4, 1.05 * core radius)
  double pin_radius(size_t k) const;

  const GlueConfig& config() const { return cfg_; }

 private:
  struct TermEval {
    double v, d1, d2;  // eta*(phi-1) and derivatives in the center distance
  };
  TermEval term(size_t k, double r) const;

  GlueConfig cfg_;
  std::vector<double> half_sep_;  // tau_k per center
  std::vector<double> pin_;       // excision radius per center
};

/// Samples the glued factor on a grid ("glued" provenance).
ConformalField glue(const GluedField& gf, const PolarGrid& grid);

/// Zone classification for defect reporting.
enum class Zone { Core, Annulus, Exact };
Zone classify(const GluedField& gf, double rho, double theta);

struct DefectSummary {
  double max_core = 0.0, max_annulus = 0.0, max_exact = 0.0;
  double annulus_rho = 0.0, annulus_theta = 0.0;  // argmax location
};

/// Scalar-curvature defect R + 6 of the glued factor over grid nodes,
/// via the exact pointwise evaluator; per-zone maxima.
DefectSummary curvature_defect(const GluedField& gf, const PolarGrid& grid);

}  // namespace ahm
