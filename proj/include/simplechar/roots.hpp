#pragma once

#include <complex>
#include <vector>

#include "simplechar/multipoly.hpp"

namespace simplechar {

/// Roots of the line restriction, ordered lexicographically by (Re, Im) with a
/// 1e-12 tie window, together with p'(tau_j).
struct RootSet {
  std::vector<cplx> roots;
  std::vector<cplx> derivs;
  std::vector<cplx> coeffs;  ///< trimmed monic-input coefficients, low to high
  double max_coeff_mag = 0.0;
};

/// Poles tau_j with weights w_j = 1/p'(tau_j) so that
/// 1/p(tau) = sum_j w_j/(tau - tau_j) for simple roots.
struct PartialFractions {
  std::vector<cplx> poles;
  std::vector<cplx> weights;
  double min_deriv = 0.0;  ///< min_j |p'(tau_j)|
};

/// Companion-matrix eigenvalues polished by <= 5 Newton steps.
/// Throws DegenerateLine when the leading coefficient vanishes
/// (relative magnitude <= 1e-14).
RootSet roots_of_coeffs(const std::vector<cplx>& coeffs);
RootSet roots(const LineRestriction& p);

/// Throws NearDoubleRoot when min pairwise root distance <= 1e-8 or
/// min |p'(tau_j)| <= 1e-12 (the caller's cutoffs must shield these).
PartialFractions partial_fractions(const RootSet& r);

/// min_j |p'(tau_j)| for the restriction of P along theta at xi_perp;
/// returns 0 by convention when the restriction degenerates to degree 0.
double min_deriv_at_roots(const MultiPoly& P, const std::vector<double>& theta,
                          const std::vector<double>& xi_perp);
double min_deriv_of_coeffs(const std::vector<cplx>& coeffs);

}  // namespace simplechar
