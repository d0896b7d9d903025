#include "simplechar/dirac.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace simplechar {

namespace {

Eigen::Matrix4cd to_eigen(const Mat4& m) {
  Eigen::Matrix4cd e;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) e(r, c) = m[r][c];
  return e;
}

Mat4 from_eigen(const Eigen::Matrix4cd& e) {
  Mat4 m;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m[r][c] = e(r, c);
  return m;
}

Mat4 ints(std::initializer_list<int> vals) {
  Mat4 m;
  auto it = vals.begin();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) m[r][c] = double(*it++);
  return m;
}

/// The transformed coefficient matrix of the line ODE
/// d/dt u_tilde + M u_tilde = A_k^{-1} f_tilde, i.e. with i xi_j weights.
Eigen::Matrix4cd ode_matrix(const DiracMatrices& dm, const std::array<double, 3>& xi,
                            int k) {
  Eigen::Matrix4cd S = to_eigen(dm.B);
  for (int j = 0; j < 3; ++j)
    if (j != k) S += cplx(0.0, xi[j]) * to_eigen(dm.A(j));
  return -to_eigen(dm.A(k)) * S;
}

}  // namespace

DiracMatrices build_matrices(double omega) {
  DiracMatrices dm;
  dm.omega = omega;
  // P = [[0,-1],[1,0]]; A1 = [[0,P],[P,0]], A2 = [[0,-I],[I,0]],
  // A3 = [[P,0],[0,-P]].
  dm.A1 = ints({0, 0, 0, -1, 0, 0, 1, 0, 0, -1, 0, 0, 1, 0, 0, 0});
  dm.A2 = ints({0, 0, -1, 0, 0, 0, 0, -1, 1, 0, 0, 0, 0, 1, 0, 0});
  dm.A3 = ints({0, -1, 0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 0, 0, -1, 0});
  dm.B = ints({0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0});
  for (int r = 0; r < 4; ++r) dm.B[r][r] = cplx(0.0, -omega);
  return dm;
}

Mat4 m_of_xi(const DiracMatrices& dm, const std::array<double, 3>& xi_perp, int k) {
  // The i xi_j weights are the ones appearing in the line ODE after the
  // partial transform; with them M is a multiple of a unitary matrix
  // (MM* = M*M = (|xi|^2 + omega^2) I), so the normality check is exact.
  Eigen::Matrix4cd M = ode_matrix(dm, xi_perp, k);
  Eigen::Matrix4cd comm = M * M.adjoint() - M.adjoint() * M;
  double scale = std::max(1.0, M.norm() * M.norm());
  if (comm.norm() > 1e-10 * scale)
    throw NotNormal("m_of_xi: coefficient matrix fails the normality hypothesis");
  return from_eigen(M);
}

SpectralSplit spectral_projections(const Mat4& Min) {
  Eigen::Matrix4cd M = to_eigen(Min);
  Eigen::ComplexSchur<Eigen::Matrix4cd> schur(M, /*computeU=*/true);
  Eigen::Matrix4cd T = schur.matrixT(), U = schur.matrixU();
  double scale = std::max(1.0, M.norm());
  double offdiag = 0.0;
  for (int r = 0; r < 4; ++r)
    for (int c = r + 1; c < 4; ++c) offdiag += std::norm(T(r, c));
  if (std::sqrt(offdiag) > 1e-8 * scale)
    throw NotNormal("spectral_projections: Schur form is not diagonal");

  // Reorder by (Re, Im) for reproducibility; the projections do not depend
  // on the order.
  std::array<int, 4> ord = {0, 1, 2, 3};
  std::sort(ord.begin(), ord.end(), [&](int a, int b) {
    cplx la = T(a, a), lb = T(b, b);
    if (la.real() != lb.real()) return la.real() < lb.real();
    return la.imag() < lb.imag();
  });

  SpectralSplit sp;
  Eigen::Matrix4cd Pp = Eigen::Matrix4cd::Zero(), Pm = Eigen::Matrix4cd::Zero();
  for (int c = 0; c < 4; ++c) {
    int j = ord[c];
    sp.lambda[c] = T(j, j);
    for (int r = 0; r < 4; ++r) sp.U[r][c] = U(r, j);
    Eigen::Matrix4cd outer = U.col(j) * U.col(j).adjoint();
    if (sp.lambda[c].real() >= 0.0)
      Pp += outer;
    else
      Pm += outer;
  }
  sp.Pplus = from_eigen(Pp);
  sp.Pminus = from_eigen(Pm);
  return sp;
}

VectorField4 partial_dft_vec4(const VectorField4& f, int axis) {
  VectorField4 g;
  for (int c = 0; c < 4; ++c) g.comp[c] = partial_dft(f.comp[c], axis);
  return g;
}

VectorField4 ipartial_dft_vec4(const VectorField4& g) {
  VectorField4 f;
  for (int c = 0; c < 4; ++c) f.comp[c] = ipartial_dft(g.comp[c]);
  return f;
}

VectorField4 solve_dirac(const VectorField4& f, double omega, int k, QuadMode mode) {
  const GridField& g0 = f.comp[0];
  if (g0.n != 3) throw DimensionMismatch("solve_dirac: three dimensions required");
  for (int c = 1; c < 4; ++c)
    if (f.comp[c].dims != g0.dims || f.comp[c].box != g0.box ||
        f.comp[c].space != g0.space)
      throw GridMismatch("solve_dirac: components on different grids");

  DiracMatrices dm = build_matrices(omega);
  Eigen::Matrix4cd Ak_inv = -to_eigen(dm.A(k));
  VectorField4 ft = partial_dft_vec4(f, k);
  VectorField4 ut = ft;

  int N = g0.dims[k];
  size_t st = ft.comp[0].stride(k);
  double h = g0.h(k);
  std::vector<int> idx(3);
  std::array<double, 3> xi{};
  std::array<std::vector<cplx>, 4> lines, out_lines;
  for (auto& l : lines) l.resize(N);
  for (auto& l : out_lines) l.resize(N);

  for (size_t base = 0; base < ft.comp[0].size(); ++base) {
    ft.comp[0].unflat(base, idx);
    if (idx[k] != 0) continue;
    for (int a = 0; a < 3; ++a) xi[a] = a == k ? 0.0 : ft.comp[0].freq(a, idx[a]);
    SpectralSplit sp = spectral_projections(from_eigen(ode_matrix(dm, xi, k)));
    Eigen::Matrix4cd U = to_eigen(sp.U);
    Eigen::Matrix4cd Uh = U.adjoint();

    // r = A_k^{-1} f_tilde rotated into the eigenbasis, one line per mode.
    for (int m = 0; m < N; ++m) {
      Eigen::Vector4cd v;
      for (int c = 0; c < 4; ++c) v(c) = ft.comp[c].data[base + m * st];
      Eigen::Vector4cd r = Uh * (Ak_inv * v);
      for (int c = 0; c < 4; ++c) lines[c][m] = r(c);
    }
    // Mode l solves c' + lambda c = r; as (D_t - q) u = g this is
    // q = i lambda, g = -i r, and Re lambda >= 0 lands on the forward
    // (decaying) sweep automatically.
    for (int l = 0; l < 4; ++l) {
      std::vector<cplx> g(N);
      for (int m = 0; m < N; ++m) g[m] = cplx(0.0, -1.0) * lines[l][m];
      out_lines[l] = first_order_line_solve(cplx(0.0, 1.0) * sp.lambda[l], g, h, mode);
    }
    for (int m = 0; m < N; ++m) {
      Eigen::Vector4cd c;
      for (int l = 0; l < 4; ++l) c(l) = out_lines[l][m];
      Eigen::Vector4cd u = U * c;
      for (int cc = 0; cc < 4; ++cc) ut.comp[cc].data[base + m * st] = u(cc);
    }
  }
  return ipartial_dft_vec4(ut);
}

double dirac_mixed_residual(const VectorField4& f, const VectorField4& u, double omega,
                            int k, QuadMode mode) {
  DiracMatrices dm = build_matrices(omega);
  Eigen::Matrix4cd Ak_inv = -to_eigen(dm.A(k));
  VectorField4 ft = partial_dft_vec4(f, k);
  VectorField4 ut = partial_dft_vec4(u, k);
  int N = ft.comp[0].dims[k];
  size_t st = ft.comp[0].stride(k);
  double h = ft.comp[0].h(k);
  std::vector<int> idx(3);
  std::array<double, 3> xi{};
  double worst = 0.0;
  for (size_t base = 0; base < ft.comp[0].size(); ++base) {
    ft.comp[0].unflat(base, idx);
    if (idx[k] != 0) continue;
    for (int a = 0; a < 3; ++a) xi[a] = a == k ? 0.0 : ft.comp[0].freq(a, idx[a]);
    SpectralSplit sp = spectral_projections(from_eigen(ode_matrix(dm, xi, k)));
    Eigen::Matrix4cd Uh = to_eigen(sp.U).adjoint();
    // Rounding in the eigenbasis rotations mixes the modes at the scale of
    // the full 4-vector, so each mode's defect is normalized by the vector
    // line scale rather than that mode's (possibly much smaller) line.
    std::array<std::vector<cplx>, 4> g, c;
    for (int l = 0; l < 4; ++l) {
      g[l].resize(N);
      c[l].resize(N);
    }
    double vec_scale = 0.0;
    for (int m = 0; m < N; ++m) {
      Eigen::Vector4cd fv, uv;
      for (int cc = 0; cc < 4; ++cc) {
        fv(cc) = ft.comp[cc].data[base + m * st];
        uv(cc) = ut.comp[cc].data[base + m * st];
      }
      Eigen::Vector4cd r = Uh * (Ak_inv * fv), cu = Uh * uv;
      for (int l = 0; l < 4; ++l) {
        g[l][m] = cplx(0.0, -1.0) * r(l);
        c[l][m] = cu(l);
      }
      vec_scale = std::max({vec_scale, cu.norm(), h * r.norm()});
    }
    for (int l = 0; l < 4; ++l)
      worst = std::max(worst, first_order_discrete_residual(
                                  cplx(0.0, 1.0) * sp.lambda[l], g[l], c[l], h, mode,
                                  LineBoundary::ZeroInflow, vec_scale));
  }
  return worst;
}

double mixed_norm_vec4(const VectorField4& mixed, double p, double q) {
  GridField mag = mixed.comp[0];
  for (size_t f = 0; f < mag.size(); ++f) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += std::norm(mixed.comp[c].data[f]);
    mag.data[f] = std::sqrt(s);
  }
  return mixed_norm(mag, p, q);
}

}  // namespace simplechar
