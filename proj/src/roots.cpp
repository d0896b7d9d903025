#include "simplechar/roots.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace simplechar {

namespace {

cplx poly_eval(const std::vector<cplx>& c, cplx t) {
  cplx acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
  return acc;
}

cplx poly_deriv(const std::vector<cplx>& c, cplx t) {
  cplx acc = 0.0;
  for (size_t k = c.size(); k-- > 1;) acc = acc * t + double(k) * c[k];
  return acc;
}

}  // namespace

RootSet roots_of_coeffs(const std::vector<cplx>& coeffs) {
  double mx = 0.0;
  for (const cplx& c : coeffs) mx = std::max(mx, std::abs(c));
  std::vector<cplx> p = coeffs;
  while (p.size() > 1 && std::abs(p.back()) <= 1e-14 * mx) p.pop_back();
  int N = static_cast<int>(p.size()) - 1;
  if (N < 1 || mx == 0.0)
    throw DegenerateLine("roots: vanishing leading coefficient (degree-0 restriction)");

  RootSet rs;
  rs.coeffs = p;
  rs.max_coeff_mag = mx;
  if (N == 1) {
    rs.roots = {-p[0] / p[1]};
  } else {
    Eigen::MatrixXcd C = Eigen::MatrixXcd::Zero(N, N);
    for (int r = 1; r < N; ++r) C(r, r - 1) = 1.0;
    for (int r = 0; r < N; ++r) C(r, N - 1) = -p[r] / p[N];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(C, /*computeEigenvectors=*/false);
    rs.roots.resize(N);
    for (int j = 0; j < N; ++j) rs.roots[j] = es.eigenvalues()(j);
  }
  // Newton polish, at most 5 steps per root.
  for (cplx& r : rs.roots) {
    for (int it = 0; it < 5; ++it) {
      cplx d = poly_deriv(p, r);
      if (std::abs(d) < 1e-300) break;
      cplx step = poly_eval(p, r) / d;
      r -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(r))) break;
    }
  }
  // Lexicographic order by (Re, Im) with a 1e-12 tie window on Re.
  std::sort(rs.roots.begin(), rs.roots.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  bool swapped = true;
  while (swapped) {
    swapped = false;
    for (size_t i = 0; i + 1 < rs.roots.size(); ++i) {
      if (std::abs(rs.roots[i + 1].real() - rs.roots[i].real()) <= 1e-12 &&
          rs.roots[i + 1].imag() < rs.roots[i].imag()) {
        std::swap(rs.roots[i], rs.roots[i + 1]);
        swapped = true;
      }
    }
  }
  rs.derivs.resize(rs.roots.size());
  for (size_t j = 0; j < rs.roots.size(); ++j) rs.derivs[j] = poly_deriv(p, rs.roots[j]);
  return rs;
}

RootSet roots(const LineRestriction& p) { return roots_of_coeffs(p.coeffs); }

PartialFractions partial_fractions(const RootSet& r) {
  double min_sep = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < r.roots.size(); ++i)
    for (size_t j = i + 1; j < r.roots.size(); ++j)
      min_sep = std::min(min_sep, std::abs(r.roots[i] - r.roots[j]));
  double min_d = std::numeric_limits<double>::infinity();
  for (const cplx& d : r.derivs) min_d = std::min(min_d, std::abs(d));
  if (min_sep <= 1e-8 || min_d <= 1e-12)
    throw NearDoubleRoot("partial_fractions: roots too close (bad-set frequency leaked "
                         "past the cutoffs)");
  PartialFractions pf;
  pf.poles = r.roots;
  pf.min_deriv = min_d;
  pf.weights.resize(r.roots.size());
  for (size_t j = 0; j < r.roots.size(); ++j) pf.weights[j] = 1.0 / r.derivs[j];
  return pf;
}

double min_deriv_of_coeffs(const std::vector<cplx>& coeffs) {
  RootSet rs;
  try {
    rs = roots_of_coeffs(coeffs);
  } catch (const DegenerateLine&) {
    return 0.0;  // degree-0 restriction: min over an empty set is 0 by convention
  }
  double m = std::numeric_limits<double>::infinity();
  for (const cplx& d : rs.derivs) m = std::min(m, std::abs(d));
  return std::isfinite(m) ? m : 0.0;
}

double min_deriv_at_roots(const MultiPoly& P, const std::vector<double>& theta,
                          const std::vector<double>& xi_perp) {
  return min_deriv_of_coeffs(restrict_to_line(P, theta, xi_perp).coeffs);
}

}  // namespace simplechar
