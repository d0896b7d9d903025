#pragma once

#include <array>

#include "simplechar/fields.hpp"
#include "simplechar/ode.hpp"

namespace simplechar {

using Mat4 = std::array<std::array<cplx, 4>, 4>;
using Vec4 = std::array<cplx, 4>;

/// Coefficients of the 4x4 first-order system A1 dx + A2 dy + A3 dz + B,
/// the prolonged curl operator with B = -i omega I. The A_j are integer
/// matrices with A_j^T = -A_j, A_j^2 = -I and A_i A_j = +-A_k.
struct DiracMatrices {
  Mat4 A1, A2, A3, B;
  double omega = 0.0;
  const Mat4& A(int j) const { return j == 0 ? A1 : j == 1 ? A2 : A3; }
};

DiracMatrices build_matrices(double omega);

/// M(xi) = A_k^{-1} (sum_{j != k} A_j (i xi_j) + B), the coefficient matrix
/// of the line ODE after the perpendicular partial transform; A_k^{-1} = -A_k.
/// Entry k of xi_perp is ignored. For these matrices M M* = M* M =
/// (|xi|^2 + omega^2) I. Throws NotNormal if ||M M* - M* M||_F exceeds
/// 1e-10 times the scale of M.
Mat4 m_of_xi(const DiracMatrices& dm, const std::array<double, 3>& xi_perp, int k);

/// Unitary eigendecomposition of a normal matrix plus the orthogonal
/// projections onto the Re lambda >= 0 and Re lambda < 0 eigenspaces.
struct SpectralSplit {
  Mat4 U;  ///< columns are an orthonormal eigenbasis
  Vec4 lambda;
  Mat4 Pplus, Pminus;
};

SpectralSplit spectral_projections(const Mat4& M);

/// Four components on one grid.
struct VectorField4 {
  std::array<GridField, 4> comp;
};

/// Directional solve of (A1 dx + A2 dy + A3 dz - i omega) u = f along grid
/// axis k: partial transform in the perpendicular plane, then per frequency
/// the system decouples in the unitary eigenbasis of the (normal) transformed
/// coefficient matrix into four scalar lines handled by the exponential
/// integrator, each integrated in its decaying direction (the Re lambda >= 0
/// modes forward, the rest backward).
VectorField4 solve_dirac(const VectorField4& f, double omega, int k,
                         QuadMode mode = QuadMode::PiecewiseConstant);

/// Mixed-exact residual oracle for solve_dirac: rebuilds the per-frequency
/// eigenbasis, rotates f and u into it, and returns the worst per-mode
/// discrete update defect (see first_order_discrete_residual).
double dirac_mixed_residual(const VectorField4& f, const VectorField4& u, double omega,
                            int k, QuadMode mode);

/// Mixed norm of the pointwise 2-norm across the four components.
double mixed_norm_vec4(const VectorField4& mixed, double p, double q);

VectorField4 partial_dft_vec4(const VectorField4& f, int axis);
VectorField4 ipartial_dft_vec4(const VectorField4& g);

}  // namespace simplechar
