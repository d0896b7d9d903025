#include "simplechar/directions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "simplechar/roots.hpp"

namespace simplechar {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<double>> perp_basis(const std::vector<double>& theta) {
  int n = static_cast<int>(theta.size());
  // Gram-Schmidt the standard basis against theta, skipping the axis most
  // parallel to it so the remaining n-1 vectors stay well conditioned.
  int skip = 0;
  for (int j = 1; j < n; ++j)
    if (std::abs(theta[j]) > std::abs(theta[skip])) skip = j;
  std::vector<std::vector<double>> basis;
  for (int j = 0; j < n; ++j) {
    if (j == skip) continue;
    std::vector<double> v(n, 0.0);
    v[j] = 1.0;
    double d = theta[j];
    for (int a = 0; a < n; ++a) v[a] -= d * theta[a];
    for (const auto& u : basis) {
      double du = 0.0;
      for (int a = 0; a < n; ++a) du += v[a] * u[a];
      for (int a = 0; a < n; ++a) v[a] -= du * u[a];
    }
    double nrm = 0.0;
    for (double x : v) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm < 1e-8) throw NearParallel("perp_basis: degenerate complement");
    for (double& x : v) x /= nrm;
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Distance from the origin to the segment [a, b] in the complex plane.
double segment_dist_to_zero(cplx a, cplx b) {
  cplx d = b - a;
  double dd = std::norm(d);
  if (dd < 1e-300) return std::abs(a);
  double t = std::clamp(-(a.real() * d.real() + a.imag() * d.imag()) / dd, 0.0, 1.0);
  return std::abs(a + t * d);
}

struct GridWalker {
  int dim, res;
  std::vector<int> idx;
  explicit GridWalker(int dim, int res) : dim(dim), res(res), idx(dim, 0) {}
  bool next() {
    for (int a = dim - 1; a >= 0; --a) {
      if (++idx[a] < res) return true;
      idx[a] = 0;
    }
    return false;
  }
};

size_t flat_idx(const std::vector<int>& idx, int res) {
  size_t f = 0;
  for (int i : idx) f = f * res + i;
  return f;
}

uint64_t splitmix(uint64_t& s) {
  uint64_t z = (s += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

std::vector<double> TangentSetSample::project(const std::vector<double>& xi) const {
  std::vector<double> c(basis.size());
  for (size_t a = 0; a < basis.size(); ++a) {
    double d = 0.0;
    for (size_t j = 0; j < xi.size(); ++j) d += basis[a][j] * xi[j];
    c[a] = d;
  }
  return c;
}

double TangentSetSample::dist_to_band(const std::vector<double>& xi) const {
  if (band_count == 0) return kInf;
  std::vector<double> c = project(xi);
  int dim = static_cast<int>(c.size());
  double cl = cell();
  double pad = 0.5 * cl * std::sqrt(double(dim));

  double norm = 0.0, off = 0.0;
  std::vector<int> idx(dim);
  for (int a = 0; a < dim; ++a) {
    norm += c[a] * c[a];
    double pos = (c[a] + extent) / cl - 0.5;
    double clamped = std::clamp(pos, 0.0, double(res - 1));
    idx[a] = static_cast<int>(std::lround(clamped));
    double miss = (pos - clamped) * cl;
    off += miss * miss;
  }
  norm = std::sqrt(norm);
  // Two lower bounds: the sampled distance field (1-Lipschitz, so padding by
  // the lookup offset keeps it conservative) and the band's outer radius.
  double via_field = dist[flat_idx(idx, res)] - pad - std::sqrt(off);
  double via_radius = norm - band_max_norm;
  return std::max({via_field, via_radius, 0.0});
}

TangentSetSample tangent_set_sample(const MultiPoly& P, const std::vector<double>& theta,
                                    double extent, int res) {
  int n = P.n();
  if (static_cast<int>(theta.size()) != n)
    throw DimensionMismatch("tangent_set_sample: direction dimension");
  TangentSetSample s;
  s.theta = theta;
  s.basis = perp_basis(theta);
  s.extent = extent;
  s.res = res;
  int dim = n - 1;
  size_t total = 1;
  for (int a = 0; a < dim; ++a) total *= res;
  s.delta.resize(total);
  s.min_deriv.resize(total);
  s.band.assign(total, 0);

  double cl = s.cell();
  std::vector<double> xi(n);
  GridWalker w(dim, res);
  size_t f = 0;
  double max_abs = 0.0;
  do {
    std::fill(xi.begin(), xi.end(), 0.0);
    for (int a = 0; a < dim; ++a) {
      double c = -extent + (w.idx[a] + 0.5) * cl;
      for (int j = 0; j < n; ++j) xi[j] += c * s.basis[a][j];
    }
    LineRestriction lr = restrict_to_line(P, theta, xi);
    if (lr.degenerate_leading)
      throw DirectionOnCharacteristicCone(
          "tangent_set_sample: principal symbol vanishes along the direction");
    s.delta[f] = discriminant_coeffs(lr.coeffs);
    s.min_deriv[f] = min_deriv_of_coeffs(lr.coeffs);
    max_abs = std::max(max_abs, std::abs(s.delta[f]));
    ++f;
  } while (w.next());

  // Zero-band detection. A point joins the band when (a) |Delta| is below a
  // one-cell multiple of the local gradient estimate, (b) the linear
  // interpolant of Delta along an edge passes through 0 and this endpoint is
  // the closer one, or (c) |Delta| has a tangential local minimum consistent
  // with a zero inside the cell (Delta ~ dist^2, so the symmetric gradient
  // estimate of (a) vanishes there).
  std::vector<size_t> strides(dim);
  {
    size_t st = 1;
    for (int a = dim - 1; a >= 0; --a) {
      strides[a] = st;
      st *= res;
    }
  }
  GridWalker w2(dim, res);
  f = 0;
  do {
    double ad = std::abs(s.delta[f]);
    bool in_band = false;
    double grad = 0.0;
    for (int a = 0; a < dim && !in_band; ++a) {
      size_t st = strides[a];
      double lo = w2.idx[a] > 0 ? std::abs(s.delta[f - st]) : ad;
      double hi = w2.idx[a] + 1 < res ? std::abs(s.delta[f + st]) : ad;
      grad = std::max(grad, 0.5 * std::abs(hi - lo) / cl);
      if (w2.idx[a] + 1 < res) {
        cplx nb = s.delta[f + st];
        if (segment_dist_to_zero(s.delta[f], nb) <= 1e-9 * max_abs && ad <= std::abs(nb))
          in_band = true;
      }
      if (w2.idx[a] > 0 && w2.idx[a] + 1 < res) {
        double d2 = std::abs(s.delta[f - st] + s.delta[f + st] - 2.0 * s.delta[f]);
        if (ad <= lo && ad <= hi && ad <= d2) in_band = true;
      }
    }
    if (ad <= 0.8 * cl * grad + 1e-12 * max_abs) in_band = true;
    s.band[f] = in_band ? 1 : 0;
    ++f;
  } while (w2.next());

  // Distance field by brute force against the band points (cell coordinates).
  std::vector<std::vector<double>> band_pts;
  GridWalker w3(dim, res);
  f = 0;
  do {
    if (s.band[f]) {
      std::vector<double> c(dim);
      double nrm = 0.0;
      for (int a = 0; a < dim; ++a) {
        c[a] = -extent + (w3.idx[a] + 0.5) * cl;
        nrm += c[a] * c[a];
      }
      s.band_max_norm = std::max(s.band_max_norm, std::sqrt(nrm));
      band_pts.push_back(std::move(c));
    }
    ++f;
  } while (w3.next());
  s.band_count = static_cast<int>(band_pts.size());

  s.dist.assign(total, kInf);
  if (!band_pts.empty()) {
    GridWalker w4(dim, res);
    f = 0;
    std::vector<double> c(dim);
    do {
      for (int a = 0; a < dim; ++a) c[a] = -extent + (w4.idx[a] + 0.5) * cl;
      double best = kInf;
      for (const auto& b : band_pts) {
        double d = 0.0;
        for (int a = 0; a < dim; ++a) d += (c[a] - b[a]) * (c[a] - b[a]);
        best = std::min(best, d);
      }
      s.dist[f] = std::sqrt(best);
      ++f;
    } while (w4.next());
  }
  return s;
}

AdmissibilityReport check_admissibility_cond1(const MultiPoly& P,
                                              const std::vector<double>& theta, double r0,
                                              double extent, int res) {
  TangentSetSample s = tangent_set_sample(P, theta, extent, res);
  AdmissibilityReport rep;
  rep.samples = static_cast<int>(s.min_deriv.size());
  for (double m : s.min_deriv) rep.max_min_deriv = std::max(rep.max_min_deriv, m);

  auto offenders = [&](double eps) {
    int bad = 0;
    for (size_t i = 0; i < s.min_deriv.size(); ++i)
      if (s.min_deriv[i] <= eps && s.dist[i] > r0) ++bad;
    return bad;
  };
  double lo = 0.0, hi = rep.max_min_deriv;
  if (offenders(hi) == 0) {
    rep.eps = hi;
    return rep;
  }
  for (int it = 0; it < 60; ++it) {
    double mid = 0.5 * (lo + hi);
    if (offenders(mid) == 0)
      lo = mid;
    else
      hi = mid;
  }
  rep.eps = lo;
  rep.offenders_at_fail = offenders(hi);
  return rep;
}

bool check_admissibility_cond2(const MultiPoly& P, const std::vector<double>& theta1,
                               const std::vector<double>& theta2, double R, double extent,
                               int res) {
  for (const auto* th : {&theta1, &theta2}) {
    TangentSetSample s = tangent_set_sample(P, *th, extent, res);
    if (s.band_max_norm > R) return false;
  }
  return true;
}

DirectionSet find_directions(const MultiPoly& P,
                             const std::vector<std::vector<double>>& candidates, double r0,
                             double eps, double cert_extent, int cert_res,
                             const FindDirectionsConfig& cfg) {
  int n = P.n();
  double tangent_extent = cfg.tangent_extent;
  if (tangent_extent <= 0.0) tangent_extent = 1.05 * cert_extent * std::sqrt(double(n));

  size_t total = 1;
  for (int a = 0; a < n; ++a) total *= cert_res;
  double cl = 2.0 * cert_extent / cert_res;
  std::vector<std::vector<double>> pts;
  pts.reserve(total);
  {
    GridWalker w(n, cert_res);
    do {
      std::vector<double> x(n);
      for (int a = 0; a < n; ++a) x[a] = -cert_extent + (w.idx[a] + 0.5) * cl;
      pts.push_back(std::move(x));
    } while (w.next());
  }

  DirectionSet ds;
  ds.r0 = r0;
  ds.eps = eps;
  ds.cert_extent = cert_extent;
  ds.cert_res = cert_res;

  std::vector<double> best_dist(total, 0.0);
  size_t uncovered = total;
  int examined = 0;
  for (const auto& cand : candidates) {
    if (uncovered == 0) break;
    if (examined >= cfg.budget)
      throw BudgetExhausted("find_directions: candidate budget exhausted with " +
                            std::to_string(uncovered) + " uncovered grid points");
    ++examined;
    TangentSetSample s;
    try {
      s = tangent_set_sample(P, cand, tangent_extent, cfg.tangent_res);
    } catch (const DirectionOnCharacteristicCone&) {
      continue;
    }
    size_t gained = 0;
    std::vector<double> d(total);
    for (size_t i = 0; i < total; ++i) {
      d[i] = s.dist_to_band(pts[i]);
      if (best_dist[i] <= 2.0 * r0 && d[i] > 2.0 * r0) ++gained;
    }
    if (gained == 0) continue;
    for (size_t i = 0; i < total; ++i) best_dist[i] = std::max(best_dist[i], d[i]);
    uncovered -= gained;
    ds.thetas.push_back(cand);
    ds.samples.push_back(std::move(s));
  }
  if (uncovered > 0)
    throw UncertifiedDirections("find_directions: " + std::to_string(uncovered) +
                                " grid points within 2 r0 of every sampled tangent set");
  double margin = kInf;
  for (size_t i = 0; i < total; ++i) margin = std::min(margin, best_dist[i] - 2.0 * r0);
  ds.margin = margin;
  return ds;
}

std::vector<std::vector<double>> sphere_candidates(const MultiPoly& P, int count,
                                                   uint64_t seed) {
  int n = P.n();
  MultiPoly PN = P.principal_part();
  double scale = std::max(PN.max_coeff_mag(), 1e-300);
  const double golden = 0.6180339887498949;
  uint64_t st = seed ? seed : 0x5eedULL;
  double u0 = double(splitmix(st) >> 11) * 0x1p-53;

  std::vector<std::vector<double>> out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  int attempts = 0;
  for (int j = 0; static_cast<int>(out.size()) < count && attempts < 64 * count;
       ++j, ++attempts) {
    std::vector<double> th(n);
    if (n == 2) {
      double ang = 2.0 * M_PI * std::fmod(u0 + j * golden, 1.0);
      th = {std::cos(ang), std::sin(ang)};
    } else if (n == 3) {
      double z = 1.0 - 2.0 * (j + 0.5) / std::max(count, 1);
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double ang = 2.0 * M_PI * std::fmod(u0 + j * golden, 1.0);
      th = {r * std::cos(ang), r * std::sin(ang), z};
    } else {
      double nrm = 0.0;
      for (double& x : th) {
        x = gauss(rng);
        nrm += x * x;
      }
      nrm = std::sqrt(nrm);
      if (nrm < 1e-12) continue;
      for (double& x : th) x /= nrm;
    }
    if (std::abs(PN.eval_real(th)) > 1e-3 * scale) out.push_back(std::move(th));
  }
  return out;
}

SecondOrderPlan second_order_directions(const NormalForm2& nf) {
  SecondOrderPlan plan;
  plan.n = nf.n;
  for (int j = 0; j < nf.n; ++j)
    if (nf.eps[j] != 0 || std::abs(nf.alpha[j]) > 1e-12) plan.axes.push_back(j);
  if (plan.axes.empty())
    throw DegenerateLine("second_order_directions: symbol is constant along every axis");
  if (std::abs(nf.b) > 1e-12 * (1.0 + std::abs(nf.Bconst))) {
    plan.eps = std::abs(nf.b) / (4.0 * nf.n);
  } else {
    double bmax = 0.0;
    for (double be : nf.beta) bmax = std::max(bmax, be * be);
    if (bmax < 1e-24)
      throw DoubleCharacteristic(
          "second_order_directions: pure quadratic form; the origin is a double "
          "characteristic and no cutoff level separates the sheets");
    plan.eps = 0.25 * bmax;
  }
  return plan;
}

}  // namespace simplechar
