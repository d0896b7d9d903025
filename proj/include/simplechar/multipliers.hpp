#pragma once

#include <functional>
#include <string>
#include <vector>

#include "simplechar/directions.hpp"
#include "simplechar/fields.hpp"
#include "simplechar/multipoly.hpp"

namespace simplechar {

/// Smooth transition profile: 0 on [0,1], 1 on [2,inf), C^inf in between
/// (the classical exp(-1/x) smoothstep).
double bump_profile(double s);
/// bump(t, eps) = bump_profile(|t|/eps): vanishes for |t| <= eps, equals 1
/// for |t| >= 2 eps.
double bump(double t, double eps);

/// A real frequency multiplier with values in [0,1] plus bookkeeping about
/// where it came from.
struct MultiplierField {
  GridField values;  ///< Frequency space, real data
  std::string provenance;
  int direction = -1;  ///< normal-form axis or direction index, -1 if n/a
  double eps = 0.0;
  double r0 = 0.0;
};

/// A family of cutoffs phi_k plus the telescoped partition pieces
/// Psi_k = phi_k prod_{j<k} (1 - phi_j) and the remainder prod_k (1 - phi_k),
/// so that sum_k Psi_k + remainder = 1 identically. prefix[k] holds the
/// running product prod_{j<k} (1 - phi_j), so Psi_k = phi_k * prefix[k];
/// routes that integrate along axis k apply phi_k (a function of the
/// perpendicular frequencies only) before the line solve and prefix[k]
/// after it, which keeps the line data compactly supported along the
/// integration axis.
struct CutoffFamily {
  std::vector<MultiplierField> raw;
  std::vector<MultiplierField> telescoped;
  std::vector<MultiplierField> prefix;
  MultiplierField remainder;
};

/// Second-order cutoffs Phi_k = 1 - (1-bump(Re Q_k, eps))(1-bump(Im Q_k, eps))
/// on the frequency grid of `like`, evaluated in normal-form coordinates.
CutoffFamily second_order_cutoffs(const NormalForm2& nf, double eps,
                                  const GridField& like);

/// Direction-set cutoffs psi_k = bump(dist(xi, band_k), r0) from the sampled
/// tangent sets of a certified direction set.
CutoffFamily general_cutoffs(const DirectionSet& ds, const GridField& like);

/// Pointwise evaluation of an arbitrary real frequency function as a
/// multiplier field (test scaffolding and one-off cutoffs).
MultiplierField multiplier_from_function(
    const GridField& like, const std::function<double(const std::vector<double>&)>& fn,
    std::string provenance);

/// fhat * m pointwise; grids must match exactly.
GridField apply_multiplier(const GridField& fhat, const MultiplierField& m);

/// Operator norm of the multiplier as a map on the Theta(1,infty) mixed norm:
/// sup over perpendicular frequencies of the L^1 norm (in t) of the inverse
/// transform of m along `axis`, divided by sqrt(2 pi). A Gaussian gives 1.
double multiplier_theta_norm(const MultiplierField& m, int axis);

/// Measured ingredients of the stationary-phase style bound for a single
/// profile factor bump(q(t), eps) along a line: mu1 is the measure of
/// {|q| <= 2 eps}, M1 and M2 bound |q'| and |q''| there (central differences),
/// and bound = 2 mu1 (M1/eps + sqrt(M2/eps)) dominates the L^1 norm of the
/// factor's inverse transform.
struct MultiplierBoundEstimate {
  double mu1 = 0.0;
  double M1 = 0.0;
  double M2 = 0.0;
  double eps = 0.0;
  double bound = 0.0;
};

MultiplierBoundEstimate bump_multiplier_bound(const std::vector<double>& q, double h,
                                              double eps);

/// Geometry of a pair of unit directions spanning a plane: alpha is the angle
/// between them, nu_perp completes nu so that
/// theta = cos(alpha) nu + sin(alpha) nu_perp.
struct PlaneGeometry {
  std::vector<double> theta, nu, nu_perp;
  double alpha = 0.0;
};

PlaneGeometry make_plane_geometry(const std::vector<double>& theta,
                                  const std::vector<double>& nu);

/// Closed-form partial transform of a one-variable multiplier seen from a
/// second direction (2-D): for Psi(xi) = psi(xi . nu_perp) and theta a grid
/// axis, returns the mixed-space field
///   (1/sin a) e^{-i ell t cot a} Fcheck[psi](t / sin a)
/// with ell the Theta-perp frequency. Serves as the oracle for the direct
/// partial transform and the associated norm identity.
GridField two_direction_transform(const std::function<cplx(double)>& psi,
                                  const PlaneGeometry& g, const GridField& like);

}  // namespace simplechar
