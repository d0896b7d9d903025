#pragma once

#include <functional>
#include <vector>

#include "simplechar/fields.hpp"
#include "simplechar/multipoly.hpp"
#include "simplechar/roots.hpp"

namespace simplechar {

/// Source reconstruction used inside each step of the exponential
/// integrator: piecewise constant keeps the contraction constant exactly 1
/// per step; cubic reconstruction gives fourth-order accuracy; spectral
/// reconstruction integrates the trigonometric interpolant of g exactly per
/// cell, so the solve is exact up to the aliasing error of g (the default
/// for end-to-end runs, where the residual should be finite-difference
/// limited rather than quadrature limited).
enum class QuadMode { PiecewiseConstant, Cubic, Spectral };

/// Boundary closure of the scalar line solve. ZeroInflow starts the sweep
/// with u = 0 at the grid edge on the incoming side. Periodic adds the
/// uniquely determined homogeneous correction that closes the recurrence
/// around the ring: for decaying lines the correction is numerically zero,
/// for oscillatory lines it selects the periodic solution, which makes the
/// field-level solve commute exactly with whole-cell cyclic translations of
/// the data. Lines within 1e-6 of an exact cyclic resonance keep the
/// zero-inflow solution (a decision that depends on q and the grid only, so
/// translation equivariance is unaffected).
enum class LineBoundary { ZeroInflow, Periodic };

/// Exact-exponential solve of the scalar line problem (D_t - q) u = g on a
/// uniform grid, D_t = -i d/dt. Integration runs from the grid edge in the
/// decaying direction: forward when Im q >= 0 (within a small tie window),
/// backward otherwise, so the step multiplier never exceeds 1 in modulus.
std::vector<cplx> first_order_line_solve(cplx q, const std::vector<cplx>& g, double h,
                                         QuadMode mode,
                                         LineBoundary bc = LineBoundary::ZeroInflow);

/// Mixed-exact residual oracle: largest defect of the discrete update rule
/// that defines first_order_line_solve, relative to the data scale. Exact
/// solutions return roundoff regardless of q or h. floor_scale raises the
/// normalization scale, for callers checking one component of a coupled
/// system whose roundoff lives at the scale of the full system data.
double first_order_discrete_residual(cplx q, const std::vector<cplx>& g,
                                     const std::vector<cplx>& u, double h, QuadMode mode,
                                     LineBoundary bc = LineBoundary::ZeroInflow,
                                     double floor_scale = 0.0);

/// p(D_t) u = g via the partial-fractions split 1/p = sum w_j / (tau - tau_j):
/// u = sum_j w_j * first_order_line_solve(tau_j, g).
std::vector<cplx> line_solve(const PartialFractions& pf, const std::vector<cplx>& g,
                             double h, QuadMode mode,
                             LineBoundary bc = LineBoundary::ZeroInflow);

/// Generic pole data for the line through xi_perp in direction theta.
PartialFractions restriction_poles(const MultiPoly& P, const std::vector<double>& theta,
                                   const std::vector<double>& xi_perp);

/// Closed-form pole data for a second-order symbol along normal-form axis k:
/// tau = -i (beta_k +- sqrt(-eps_k Q_k(eta))), residue weights 1/p'(tau).
/// eta is the frequency point in normal coordinates (the k-th entry is
/// ignored). Throws NearDoubleRoot when Q_k is too close to 0.
PartialFractions second_order_poles(const NormalForm2& nf, int k,
                                    const std::vector<double>& eta);

/// Runs the line solver across a mixed-space field: for every perpendicular
/// frequency, pf_at receives the full frequency vector (0 in the retained
/// axis slot) and supplies poles and weights for that line.
GridField apply_line_solver(
    const GridField& g_mixed, int axis,
    const std::function<PartialFractions(const std::vector<double>&)>& pf_at,
    QuadMode mode, LineBoundary bc = LineBoundary::ZeroInflow);

/// Pointwise division u_hat = f_hat / P(xi) on the frequency grid. Throws
/// DivisionOnZeroSet if |P| < min_abs anywhere f_hat carries mass.
GridField fourier_divide(const GridField& fhat, const MultiPoly& P, double min_abs);

}  // namespace simplechar
