#include "simplechar/ode.hpp"

#include <fftw3.h>

#include <array>
#include <cmath>
#include <map>
#include <mutex>

namespace simplechar {

namespace {

std::mutex g_ode_plan_mutex;

fftw_plan ode_plan(int N, int sign) {
  static std::map<std::pair<int, int>, std::pair<fftw_plan, fftw_complex*>> cache;
  std::lock_guard<std::mutex> lock(g_ode_plan_mutex);
  auto key = std::make_pair(N, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second.first;
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(N));
  fftw_plan plan = fftw_plan_dft_1d(N, buf, buf, sign, FFTW_ESTIMATE);
  cache.emplace(key, std::make_pair(plan, buf));
  return plan;
}

/// Per-cell increments int_0^h e^{z(h-s)} i g(t_m + s) ds for the
/// trigonometric interpolant of g: exact per frequency, assembled by FFT.
std::vector<cplx> spectral_increments(cplx z, const std::vector<cplx>& g, double h) {
  const int N = static_cast<int>(g.size());
  std::vector<cplx> inc(N);
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(N));
  cplx* cbuf = reinterpret_cast<cplx*>(buf);
  for (int m = 0; m < N; ++m) cbuf[m] = g[m];
  fftw_execute_dft(ode_plan(N, FFTW_FORWARD), buf, buf);
  const double L = N * h;
  const cplx ez = std::exp(z * h);
  for (int j = 0; j < N; ++j) {
    const double tau = 2.0 * M_PI * (j <= N / 2 ? j : j - N) / L;
    const cplx d = cplx(0.0, tau) - z;
    cplx E;
    if (std::abs(d) * h < 1e-6) {
      cplx dh = d * h;
      E = ez * h * (1.0 + dh * (0.5 + dh / 6.0));
    } else {
      E = (std::exp(cplx(0.0, tau * h)) - ez) / d;
    }
    cbuf[j] *= cplx(0.0, 1.0) * E / double(N);
  }
  fftw_execute_dft(ode_plan(N, FFTW_BACKWARD), buf, buf);
  for (int m = 0; m < N; ++m) inc[m] = cbuf[m];
  fftw_free(buf);
  // The trigonometric interpolant rings at the aliasing level between
  // negligible samples, so increments would pick up spurious mass far from
  // the support of g. Zeroing cells whose local samples are negligible
  // restores exact zero increments off-support; the mask is a pointwise
  // function of |g|, so it commutes with whole-cell translations.
  double gmax = 0.0;
  for (int m = 0; m < N; ++m) gmax = std::max(gmax, std::abs(g[m]));
  const double tiny = 1e-14 * gmax;
  for (int m = 0; m < N; ++m) {
    bool dead = true;
    for (int o = -1; o <= 2 && dead; ++o)
      dead = std::abs(g[(m + o + N) % N]) <= tiny;
    if (dead) inc[m] = 0.0;
  }
  return inc;
}

/// Moments I_j = int_0^h e^{z(h-s)} s^j ds, j = 0..3, via the downward-stable
/// Taylor series for small |z h| and the exact recurrence otherwise.
std::array<cplx, 4> step_moments(cplx z, double h) {
  std::array<cplx, 4> I;
  if (std::abs(z) * h < 0.5) {
    // I_j = h^{j+1} j! sum_m (z h)^m / (m + j + 1)!
    cplx zh = z * h;
    for (int j = 0; j < 4; ++j) {
      double fact = 1.0;
      for (int k = 2; k <= j; ++k) fact *= k;
      cplx term = fact;
      for (int k = 1; k <= j + 1; ++k) term /= double(k);
      cplx acc = term;
      for (int m = 1; m < 40; ++m) {
        term *= zh / double(m + j + 1);
        acc += term;
        if (std::abs(term) < 1e-18 * std::abs(acc)) break;
      }
      I[j] = acc * std::pow(h, j + 1);
    }
  } else {
    cplx ez = std::exp(z * h);
    I[0] = (ez - 1.0) / z;
    double hj = 1.0;
    for (int j = 1; j < 4; ++j) {
      hj *= h;
      I[j] = -hj / z + double(j) / z * I[j - 1];
    }
  }
  return I;
}

/// Exact cubic through (-h, f0), (0, f1), (h, f2), (2h, f3) as coefficients
/// of 1, s, s^2, s^3 about s = 0.
std::array<cplx, 4> cubic_coeffs(cplx fm, cplx f0, cplx fp, cplx fpp, double h) {
  std::array<cplx, 4> a;
  a[0] = f0;
  a[3] = (fpp - 3.0 * fp + 3.0 * f0 - fm) / (6.0 * h * h * h);
  a[2] = (fp + fm - 2.0 * f0) / (2.0 * h * h);
  a[1] = (6.0 * fp - 2.0 * fm - 3.0 * f0 - fpp) / (6.0 * h);
  return a;
}

/// increment(m) = int_0^h e^{z(h-s)} i g(t_m + s) ds under the mode's
/// reconstruction of g; the forward update is u[m+1] = e^{zh} u[m] + inc[m].
std::vector<cplx> step_increments(cplx z, const std::vector<cplx>& g, double h,
                                  QuadMode mode) {
  const int N = static_cast<int>(g.size());
  if (mode == QuadMode::Spectral) return spectral_increments(z, g, h);
  std::array<cplx, 4> I = step_moments(z, h);
  auto G = [&](int m) { return m >= 0 && m < N ? cplx(0.0, 1.0) * g[m] : cplx(0.0); };
  std::vector<cplx> inc(N);
  for (int m = 0; m < N; ++m) {
    if (mode == QuadMode::PiecewiseConstant) {
      inc[m] = G(m) * I[0];
    } else {
      std::array<cplx, 4> a = cubic_coeffs(G(m - 1), G(m), G(m + 1), G(m + 2), h);
      inc[m] = a[0] * I[0] + a[1] * I[1] + a[2] * I[2] + a[3] * I[3];
    }
  }
  return inc;
}

bool integrates_forward(cplx q) { return q.imag() >= -1e-12 * (1.0 + std::abs(q)); }

}  // namespace

std::vector<cplx> first_order_line_solve(cplx q, const std::vector<cplx>& g, double h,
                                         QuadMode mode, LineBoundary bc) {
  int N = static_cast<int>(g.size());
  std::vector<cplx> u(N, 0.0);
  if (N == 0) return u;
  // (D_t - q) u = g with D_t = -i d/dt is u' - i q u = i g; z = i q.
  cplx z = cplx(0.0, 1.0) * q;
  cplx ez = std::exp(z * h);
  cplx emz = std::exp(-z * h);
  std::vector<cplx> inc = step_increments(z, g, h, mode);
  if (integrates_forward(q)) {
    for (int m = 0; m + 1 < N; ++m) u[m + 1] = ez * u[m] + inc[m];
    if (bc == LineBoundary::Periodic) {
      // Homogeneous correction c e^{z h m} closing the seam
      // u[0] = e^{zh} u[N-1] + inc[N-1]; |e^{zh}| <= 1 keeps it stable.
      cplx ezN = std::pow(ez, N);
      cplx denom = 1.0 - ezN;
      if (std::abs(denom) > 1e-6) {
        cplx c = (ez * u[N - 1] + inc[N - 1]) / denom;
        cplx pw = 1.0;
        for (int m = 0; m < N; ++m, pw *= ez) u[m] += c * pw;
      }
    }
  } else {
    for (int m = N - 2; m >= 0; --m) u[m] = emz * (u[m + 1] - inc[m]);
    if (bc == LineBoundary::Periodic) {
      // Homogeneous correction c e^{-z h (N-1-m)}, decaying backward, with
      // the seam condition u[N-1] = e^{-zh} (u[0] - inc[N-1]).
      cplx emzN = std::pow(emz, N);
      cplx denom = 1.0 - emzN;
      if (std::abs(denom) > 1e-6) {
        cplx c = emz * (u[0] - inc[N - 1]) / denom;
        cplx pw = 1.0;
        for (int m = N - 1; m >= 0; --m, pw *= emz) u[m] += c * pw;
      }
    }
  }
  return u;
}

double first_order_discrete_residual(cplx q, const std::vector<cplx>& g,
                                     const std::vector<cplx>& u, double h, QuadMode mode,
                                     LineBoundary bc, double floor_scale) {
  int N = static_cast<int>(g.size());
  if (N == 0) return 0.0;
  cplx z = cplx(0.0, 1.0) * q;
  cplx ez = std::exp(z * h);
  std::vector<cplx> inc = step_increments(z, g, h, mode);
  double scale = floor_scale;
  for (int m = 0; m < N; ++m)
    scale = std::max({scale, std::abs(u[m]), std::abs(inc[m])});
  if (scale == 0.0) return 0.0;
  bool fwd = integrates_forward(q);
  double norm = fwd ? 1.0 : std::abs(ez);
  double worst = 0.0;
  if (bc == LineBoundary::ZeroInflow) {
    // The boundary step (zero inflow at the integration origin) is part of
    // the contract, so it is checked too.
    worst = fwd ? std::abs(u[0]) : std::abs(u[N - 1]);
    for (int m = 0; m + 1 < N; ++m)
      worst = std::max(worst, std::abs(u[m + 1] - ez * u[m] - inc[m]) / norm);
  } else {
    for (int m = 0; m < N; ++m)
      worst = std::max(worst, std::abs(u[(m + 1) % N] - ez * u[m] - inc[m]) / norm);
  }
  return worst / scale;
}

std::vector<cplx> line_solve(const PartialFractions& pf, const std::vector<cplx>& g,
                             double h, QuadMode mode, LineBoundary bc) {
  std::vector<cplx> u(g.size(), 0.0);
  for (size_t j = 0; j < pf.poles.size(); ++j) {
    std::vector<cplx> uj = first_order_line_solve(pf.poles[j], g, h, mode, bc);
    for (size_t m = 0; m < u.size(); ++m) u[m] += pf.weights[j] * uj[m];
  }
  return u;
}

PartialFractions restriction_poles(const MultiPoly& P, const std::vector<double>& theta,
                                   const std::vector<double>& xi_perp) {
  return partial_fractions(roots(restrict_to_line(P, theta, xi_perp)));
}

PartialFractions second_order_poles(const NormalForm2& nf, int k,
                                    const std::vector<double>& eta) {
  if (nf.eps[k] == 0)
    throw DegenerateLine("second_order_poles: axis is null in the quadratic part");
  cplx Q = nf.Qk(k, eta);
  cplx s = std::sqrt(-double(nf.eps[k]) * Q);
  if (s.imag() < 0.0 || (s.imag() == 0.0 && s.real() < 0.0)) s = -s;
  if (std::abs(s) <= 1e-8)
    throw NearDoubleRoot("second_order_poles: Q_k too close to the tangent set");
  PartialFractions pf;
  cplx i(0.0, 1.0);
  // p(tau) = eps (i tau - beta)^2 + Q, p'(tau) = 2 i eps (i tau - beta).
  for (cplx root : {cplx(nf.beta[k]) + s, cplx(nf.beta[k]) - s}) {
    cplx tau = -i * root;
    pf.poles.push_back(tau);
    pf.weights.push_back(1.0 / (2.0 * i * double(nf.eps[k]) * (i * tau - nf.beta[k])));
  }
  pf.min_deriv = 2.0 * std::abs(s);
  return pf;
}

GridField apply_line_solver(
    const GridField& g_mixed, int axis,
    const std::function<PartialFractions(const std::vector<double>&)>& pf_at,
    QuadMode mode, LineBoundary bc) {
  if (g_mixed.space != Space::Mixed || g_mixed.mixed_axis != axis)
    throw GridMismatch("apply_line_solver: field must be mixed along the solve axis");
  GridField out = g_mixed;
  int N = g_mixed.dims[axis];
  size_t st = g_mixed.stride(axis);
  double h = g_mixed.h(axis);
  double gmax = 0.0;
  for (const cplx& z : g_mixed.data) gmax = std::max(gmax, std::abs(z));
  std::vector<int> idx(g_mixed.n);
  std::vector<double> xi(g_mixed.n);
  std::vector<cplx> line(N);
  for (size_t f = 0; f < g_mixed.size(); ++f) {
    g_mixed.unflat(f, idx);
    if (idx[axis] != 0) continue;
    double lmax = 0.0;
    for (int m = 0; m < N; ++m) {
      line[m] = g_mixed.data[f + m * st];
      lmax = std::max(lmax, std::abs(line[m]));
    }
    // Lines the cutoffs annihilated carry no mass; skipping them keeps pole
    // extraction away from the bad set it was designed to avoid.
    if (lmax <= 1e-300 || lmax <= 1e-16 * gmax) {
      for (int m = 0; m < N; ++m) out.data[f + m * st] = 0.0;
      continue;
    }
    for (int a = 0; a < g_mixed.n; ++a)
      xi[a] = a == axis ? 0.0 : g_mixed.freq(a, idx[a]);
    PartialFractions pf = pf_at(xi);
    std::vector<cplx> u = line_solve(pf, line, h, mode, bc);
    for (int m = 0; m < N; ++m) out.data[f + m * st] = u[m];
  }
  return out;
}

GridField fourier_divide(const GridField& fhat, const MultiPoly& P, double min_abs) {
  if (fhat.space != Space::Frequency)
    throw GridMismatch("fourier_divide: field must be in frequency space");
  double fmax = 0.0;
  for (const cplx& z : fhat.data) fmax = std::max(fmax, std::abs(z));
  GridField out = fhat;
  std::vector<int> idx(fhat.n);
  std::vector<double> xi(fhat.n);
  for (size_t f = 0; f < fhat.size(); ++f) {
    fhat.unflat(f, idx);
    for (int a = 0; a < fhat.n; ++a) xi[a] = fhat.freq(a, idx[a]);
    cplx p = P.eval_real(xi);
    if (std::abs(p) >= min_abs) {
      out.data[f] = fhat.data[f] / p;
    } else if (std::abs(fhat.data[f]) <= 1e-13 * fmax) {
      out.data[f] = 0.0;
    } else {
      throw DivisionOnZeroSet("fourier_divide: source mass on |P| < min_abs");
    }
  }
  return out;
}

}  // namespace simplechar
