#include "simplechar/multipliers.hpp"

#include <algorithm>
#include <cmath>

namespace simplechar {

namespace {

double smooth_edge(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

std::vector<double> freq_point(const GridField& g, const std::vector<int>& idx) {
  std::vector<double> xi(g.n);
  for (int a = 0; a < g.n; ++a) xi[a] = g.freq(a, idx[a]);
  return xi;
}

MultiplierField make_cutoff(const GridField& like,
                            const std::function<double(const std::vector<double>&)>& fn,
                            std::string provenance) {
  MultiplierField m;
  m.values = GridField::zeros(like.dims, like.box, Space::Frequency);
  m.provenance = std::move(provenance);
  std::vector<int> idx(like.n);
  for (size_t f = 0; f < m.values.size(); ++f) {
    m.values.unflat(f, idx);
    m.values.data[f] = fn(freq_point(m.values, idx));
  }
  return m;
}

CutoffFamily telescope(std::vector<MultiplierField> raw) {
  CutoffFamily fam;
  fam.raw = std::move(raw);
  const GridField& like = fam.raw.front().values;
  GridField prod = GridField::zeros(like.dims, like.box, Space::Frequency);
  for (cplx& z : prod.data) z = 1.0;
  for (const MultiplierField& m : fam.raw) {
    MultiplierField t = m;
    t.provenance = "telescoped(" + m.provenance + ")";
    MultiplierField p = m;
    p.provenance = "prefix(" + m.provenance + ")";
    p.values = prod;
    for (size_t f = 0; f < prod.size(); ++f) {
      t.values.data[f] = m.values.data[f] * prod.data[f];
      prod.data[f] *= 1.0 - m.values.data[f];
    }
    fam.telescoped.push_back(std::move(t));
    fam.prefix.push_back(std::move(p));
  }
  fam.remainder.values = std::move(prod);
  fam.remainder.provenance = "remainder";
  fam.remainder.eps = fam.raw.front().eps;
  fam.remainder.r0 = fam.raw.front().r0;
  return fam;
}

}  // namespace

double bump_profile(double s) {
  if (s <= 1.0) return 0.0;
  if (s >= 2.0) return 1.0;
  double a = smooth_edge(s - 1.0), b = smooth_edge(2.0 - s);
  return a / (a + b);
}

double bump(double t, double eps) {
  if (!(eps > 0.0)) throw ConfigError("bump: eps must be positive");
  return bump_profile(std::abs(t) / eps);
}

CutoffFamily second_order_cutoffs(const NormalForm2& nf, double eps,
                                  const GridField& like) {
  if (like.n != nf.n) throw DimensionMismatch("second_order_cutoffs: grid dimension");
  std::vector<MultiplierField> raw;
  for (int k = 0; k < nf.n; ++k) {
    MultiplierField m = make_cutoff(
        like,
        [&](const std::vector<double>& xi) {
          cplx Q = nf.Qk(k, nf.to_normal(xi));
          return 1.0 - (1.0 - bump(Q.real(), eps)) * (1.0 - bump(Q.imag(), eps));
        },
        "axis_cutoff_" + std::to_string(k));
    m.direction = k;
    m.eps = eps;
    raw.push_back(std::move(m));
  }
  return telescope(std::move(raw));
}

CutoffFamily general_cutoffs(const DirectionSet& ds, const GridField& like) {
  std::vector<MultiplierField> raw;
  for (size_t k = 0; k < ds.samples.size(); ++k) {
    MultiplierField m = make_cutoff(
        like,
        [&](const std::vector<double>& xi) {
          double d = ds.samples[k].dist_to_band(xi);
          return std::isinf(d) ? 1.0 : bump(d, ds.r0);
        },
        "direction_cutoff_" + std::to_string(k));
    m.direction = static_cast<int>(k);
    m.r0 = ds.r0;
    m.eps = ds.eps;
    raw.push_back(std::move(m));
  }
  return telescope(std::move(raw));
}

MultiplierField multiplier_from_function(
    const GridField& like, const std::function<double(const std::vector<double>&)>& fn,
    std::string provenance) {
  return make_cutoff(like, fn, std::move(provenance));
}

GridField apply_multiplier(const GridField& fhat, const MultiplierField& m) {
  if (fhat.space != Space::Frequency)
    throw GridMismatch("apply_multiplier: field must be in frequency space");
  if (fhat.dims != m.values.dims || fhat.box != m.values.box)
    throw GridMismatch("apply_multiplier: grid mismatch");
  GridField out = fhat;
  for (size_t f = 0; f < out.size(); ++f) out.data[f] *= m.values.data[f];
  return out;
}

double multiplier_theta_norm(const MultiplierField& m, int axis) {
  // Inverse transform along `axis` only: full inverse, then forward on the
  // other axes.
  GridField w = partial_dft(idft_full(m.values), axis);
  double ht = w.h(axis);
  std::vector<double> line_l1(w.size(), 0.0);
  std::vector<int> idx(w.n);
  for (size_t f = 0; f < w.size(); ++f) {
    w.unflat(f, idx);
    idx[axis] = 0;
    line_l1[w.flat(idx)] += std::abs(w.data[f]) * ht;
  }
  double sup = 0.0;
  for (double v : line_l1) sup = std::max(sup, v);
  return sup / std::sqrt(2.0 * M_PI);
}

MultiplierBoundEstimate bump_multiplier_bound(const std::vector<double>& q, double h,
                                              double eps) {
  MultiplierBoundEstimate e;
  e.eps = eps;
  int M = static_cast<int>(q.size());
  for (int i = 0; i < M; ++i) {
    if (std::abs(q[i]) > 2.0 * eps) continue;
    e.mu1 += h;
    int lo = std::max(i - 1, 0), hi = std::min(i + 1, M - 1);
    double d1 = (q[hi] - q[lo]) / ((hi - lo) * h);
    e.M1 = std::max(e.M1, std::abs(d1));
    if (i > 0 && i + 1 < M) {
      double d2 = (q[i + 1] + q[i - 1] - 2.0 * q[i]) / (h * h);
      e.M2 = std::max(e.M2, std::abs(d2));
    }
  }
  e.bound = 2.0 * e.mu1 * (e.M1 / eps + std::sqrt(e.M2 / eps));
  return e;
}

PlaneGeometry make_plane_geometry(const std::vector<double>& theta,
                                  const std::vector<double>& nu) {
  if (theta.size() != nu.size()) throw DimensionMismatch("make_plane_geometry");
  double dot = 0.0, nt = 0.0, nn = 0.0;
  for (size_t a = 0; a < theta.size(); ++a) {
    dot += theta[a] * nu[a];
    nt += theta[a] * theta[a];
    nn += nu[a] * nu[a];
  }
  if (std::abs(nt - 1.0) > 1e-10 || std::abs(nn - 1.0) > 1e-10)
    throw ConfigError("make_plane_geometry: directions must be unit vectors");
  if (std::abs(dot) > 1.0 - 1e-6)
    throw NearParallel("make_plane_geometry: directions nearly parallel");
  PlaneGeometry g;
  g.theta = theta;
  g.nu = nu;
  g.alpha = std::acos(std::clamp(dot, -1.0, 1.0));
  double s = std::sin(g.alpha);
  g.nu_perp.resize(theta.size());
  for (size_t a = 0; a < theta.size(); ++a)
    g.nu_perp[a] = (theta[a] - dot * nu[a]) / s;
  return g;
}

GridField two_direction_transform(const std::function<cplx(double)>& psi,
                                  const PlaneGeometry& g, const GridField& like) {
  if (like.n != 2 || g.theta.size() != 2)
    throw DimensionMismatch("two_direction_transform: planar (n = 2) only");
  int t_axis = -1;
  for (int a = 0; a < 2; ++a)
    if (std::abs(g.theta[a] - 1.0) < 1e-9) t_axis = a;
  if (t_axis < 0)
    throw ConfigError("two_direction_transform: theta must be a positive grid axis");
  int p_axis = 1 - t_axis;

  double ca = std::cos(g.alpha), sa = std::sin(g.alpha);
  // theta_perp = -sin(a) nu + cos(a) nu_perp fixes the sign of the
  // Theta-perp frequency coordinate relative to the grid axis.
  double sgn = -sa * g.nu[p_axis] + ca * g.nu_perp[p_axis];
  if (std::abs(std::abs(sgn) - 1.0) > 1e-9)
    throw ConfigError("two_direction_transform: nu must lie in the grid plane");
  sgn = sgn > 0 ? 1.0 : -1.0;

  // Quadrature for Fcheck[psi](s) = (1/sqrt(2 pi)) int psi(r) e^{i s r} dr.
  double W = 0.0;
  for (int a = 0; a < 2; ++a) W = std::max(W, M_PI * like.dims[a] / like.box[a]);
  W *= 1.5;
  const int M = 16384;
  double dr = 2.0 * W / M;
  std::vector<cplx> samples(M);
  for (int m = 0; m < M; ++m) samples[m] = psi(-W + (m + 0.5) * dr);
  auto fcheck = [&](double s) {
    cplx acc = 0.0;
    for (int m = 0; m < M; ++m) {
      double r = -W + (m + 0.5) * dr;
      acc += samples[m] * std::polar(1.0, s * r);
    }
    return acc * (dr / std::sqrt(2.0 * M_PI));
  };

  GridField out = GridField::zeros(like.dims, like.box, Space::Mixed, t_axis);
  std::vector<cplx> prof(like.dims[t_axis]);
  for (int j = 0; j < like.dims[t_axis]; ++j)
    prof[j] = fcheck(out.coord(t_axis, j) / sa) / sa;
  std::vector<int> idx(2);
  for (size_t f = 0; f < out.size(); ++f) {
    out.unflat(f, idx);
    double t = out.coord(t_axis, idx[t_axis]);
    double ell = sgn * out.freq(p_axis, idx[p_axis]);
    out.data[f] = prof[idx[t_axis]] * std::polar(1.0, -ell * t * ca / sa);
  }
  return out;
}

}  // namespace simplechar
