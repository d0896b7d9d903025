#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "simplechar/dirac.hpp"
#include "simplechar/fields.hpp"
#include "simplechar/multipliers.hpp"
#include "simplechar/multipoly.hpp"
#include "simplechar/ode.hpp"

namespace simplechar {

enum class Preset { Helmholtz, Bilaplacian, Faddeev, Quartic, Dirac, Laplacian, Custom };

/// How poles along each line are computed in the second-order route: generic
/// companion-matrix roots or the closed form from the normal form. The two
/// are algebraically identical; running both is a cross-check.
enum class PoleRoute { Generic, ClosedForm };

/// One smooth source blob: a Gaussian of the given width, smoothly truncated
/// to vanish outside |x - center| >= 4 width (so supp f really is compact).
struct SourceBump {
  std::vector<double> center;
  double width = 1.0;
  cplx amplitude = 1.0;
};

struct Scenario {
  Preset preset = Preset::Custom;
  double param = 1.0;  ///< k (Helmholtz), lambda (bilaplacian), |Re zeta|, omega
  MultiPoly symbol{2};
  std::vector<int> dims;
  std::vector<double> box;
  std::vector<SourceBump> bumps;
  DomainSpec Ds, Dr;
  double eps = 0.0;  ///< 0: derived from the symbol
  double r0 = 0.0;   ///< 0: preset default
  QuadMode mode = QuadMode::Spectral;
  PoleRoute route = PoleRoute::Generic;
  uint64_t seed = 1;
};

/// Scalar symbol for a preset (throws for Dirac, which is a system).
MultiPoly preset_symbol(Preset p, double param, int n);

/// Standard scenario for a preset at the given resolution. Geometry scales
/// exactly with the symbol's natural length (1/k, 1/sqrt(lambda), 1/|Re
/// zeta|), which makes the scaling studies discrete-exact.
Scenario make_scenario(Preset p, double param, int resolution, int n = 2);

struct SolveReport {
  std::vector<double> multiplier_norms;  ///< Theta(1,inf) norm per piece
  std::vector<double> direction_ratios;  ///< Theta(inf,2)/Theta(1,2) per piece
  double decomposition_error = 0.0;      ///< || sum f_k - f || / ||f||
  double residual_fd = std::numeric_limits<double>::quiet_NaN();
  double u_norm = 0.0, f_norm = 0.0;  ///< L2 over Dr and Ds
  double d_r = 0.0, d_s = 0.0;
  double ratio = 0.0;  ///< u_norm / (sqrt(d_r d_s) f_norm)
  double rotation_residual = 0.0;
  double eps_used = 0.0, r0_used = 0.0;
  double seconds = 0.0;
};

struct SolveResult {
  GridField u;
  std::optional<VectorField4> u4;  ///< Dirac preset only
  SolveReport report;
};

GridField build_source(const Scenario& sc);

SolveResult solve(const Scenario& sc);

/// Order-8 finite-difference application of the preset's operator on the
/// grid interior (margin cells trimmed): relative L2 residual of P(D)u - f.
/// Supported for Helmholtz, bilaplacian, Faddeev and Laplacian stencils.
double interior_fd_residual(const Scenario& sc, const GridField& u, const GridField& f,
                            int margin = 16);

struct RatioRow {
  double param = 0.0;
  double d_r = 0.0, d_s = 0.0;
  double u_norm = 0.0, f_norm = 0.0;
  double ratio = 0.0;
  double residual = std::numeric_limits<double>::quiet_NaN();
};

std::vector<RatioRow> verify_estimate(const std::vector<Scenario>& family);

struct ScalingFit {
  std::vector<double> params, ratios;
  double slope = 0.0, intercept = 0.0;
};

ScalingFit fit_loglog(const std::vector<double>& params, const std::vector<double>& ratios);
ScalingFit scaling_study(Preset p, const std::vector<double>& params, int resolution);

struct InvarianceReport {
  double base_ratio = 0.0;
  std::vector<double> ratios;
  double max_rel_dev = 0.0;
  double resample_residual = 0.0;  ///< worst rotation round-trip residual
};

/// Shifts are whole-cell integer offsets applied to source and domains.
InvarianceReport translation_study(const Scenario& sc,
                                   const std::vector<std::vector<int>>& shifts);
/// Rotates the source field (trigonometric resampling) and the domains by
/// each angle about the origin; symbol must be rotation invariant.
InvarianceReport rotation_study(const Scenario& sc, const std::vector<double>& angles);

struct MultiballReport {
  double lhs = 0.0;      ///< sup over targets of ||u||_{L2(D)} / sqrt(d)
  double rhs_sum = 0.0;  ///< sum_j sqrt(b_j) ||f||_{L2(B_j)}
  double constant = 0.0;
};

MultiballReport multiball_bound(const Scenario& sc, const std::vector<DomainSpec>& targets);

struct CounterexampleFit {
  std::vector<double> A, ratio;
  double slope = 0.0;
};

/// Newtonian potential of the unit-density ball B_A, evaluated analytically:
/// ratio(A) = ||u||_{L2(B_R(c))} / (sqrt(d_r d_s) ||f||_{L2(B_A)}) with
/// |c| = 2R. The growth of this ratio in A is what breaks the
/// diameter-estimate for the double-characteristic symbol.
CounterexampleFit laplacian_counterexample(const std::vector<double>& As, double R);

}  // namespace simplechar
