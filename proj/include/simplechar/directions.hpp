#pragma once

#include <cstdint>
#include <vector>

#include "simplechar/multipoly.hpp"

namespace simplechar {

/// Sampled picture of the tangent set D_Theta (frequencies where the line
/// restriction has a double root) on a grid in Theta-perp coordinates:
/// |Delta|, min |p'(tau_j)|, the detected zero band, and a distance field.
struct TangentSetSample {
  std::vector<double> theta;
  std::vector<std::vector<double>> basis;  ///< n-1 orthonormal spanning vectors
  double extent = 0.0;                     ///< grid covers [-extent, extent]^{n-1}
  int res = 0;                             ///< points per axis
  std::vector<cplx> delta;                 ///< Delta(Theta, xi_perp), row-major
  std::vector<double> min_deriv;
  std::vector<char> band;                  ///< zero-band membership per grid point
  std::vector<double> dist;                ///< distance to band per grid point
  double band_max_norm = 0.0;              ///< max |coords| over band points
  int band_count = 0;

  double cell() const { return 2.0 * extent / res; }
  /// Theta-perp coordinates of a full frequency vector xi.
  std::vector<double> project(const std::vector<double>& xi) const;
  /// Conservative lower bound on dist(xi, band cylinder); +inf if band empty.
  double dist_to_band(const std::vector<double>& xi) const;
};

TangentSetSample tangent_set_sample(const MultiPoly& P, const std::vector<double>& theta,
                                    double extent, int res);

/// Certified direction set: every certGrid point is at distance > 2 r0 from
/// at least one sampled tangent set, with the stated margin.
struct DirectionSet {
  std::vector<std::vector<double>> thetas;
  std::vector<TangentSetSample> samples;
  double r0 = 0.0;
  double eps = 0.0;
  double margin = 0.0;
  double cert_extent = 0.0;
  int cert_res = 0;
};

struct FindDirectionsConfig {
  double tangent_extent = 0.0;  ///< 0: derived from cert_extent
  int tangent_res = 256;
  int budget = 64;  ///< max candidates examined
};

DirectionSet find_directions(const MultiPoly& P,
                             const std::vector<std::vector<double>>& candidates, double r0,
                             double eps, double cert_extent, int cert_res,
                             const FindDirectionsConfig& cfg = {});

/// Low-discrepancy unit directions (golden-angle circle / Fibonacci sphere),
/// filtered by |P_N(Theta)| > 1e-3, deterministic given the seed.
std::vector<std::vector<double>> sphere_candidates(const MultiPoly& P, int count,
                                                   uint64_t seed);

struct AdmissibilityReport {
  double eps = 0.0;       ///< largest tested level that passed (0: none)
  double max_min_deriv = 0.0;
  int samples = 0;
  int offenders_at_fail = 0;
};

/// Condition 1 of admissibility: every sampled xi_perp with
/// min_deriv_at_roots <= eps lies within r0 of the sampled zero band.
/// Largest passing eps found by bisection.
AdmissibilityReport check_admissibility_cond1(const MultiPoly& P,
                                              const std::vector<double>& theta, double r0,
                                              double extent, int res);

/// Condition 2: the sampled zero bands in both Theta-perps are empty outside
/// radius R.
bool check_admissibility_cond2(const MultiPoly& P, const std::vector<double>& theta1,
                               const std::vector<double>& theta2, double R, double extent,
                               int res);

/// The second-order route's plan: the n coordinate directions plus a
/// Fourier-division remainder, with the cutoff level eps.
struct SecondOrderPlan {
  int n = 0;
  std::vector<int> axes;
  double eps = 0.0;
};

SecondOrderPlan second_order_directions(const NormalForm2& nf);

}  // namespace simplechar
