#include "simplechar/multipoly.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <sstream>

#include "simplechar/roots.hpp"

namespace simplechar {

bool GradedLex::operator()(const std::vector<int>& a, const std::vector<int>& b) const {
  int da = std::accumulate(a.begin(), a.end(), 0);
  int db = std::accumulate(b.begin(), b.end(), 0);
  if (da != db) return da < db;
  return a < b;
}

MultiPoly::MultiPoly(int n) : n_(n) {
  if (n < 1) throw DimensionMismatch("MultiPoly dimension must be >= 1");
}

int MultiPoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0));
  return d;
}

double MultiPoly::max_coeff_mag() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

void MultiPoly::add_term(std::vector<int> exps, cplx c) {
  if (static_cast<int>(exps.size()) != n_)
    throw DimensionMismatch("term multi-index length != n");
  for (int e : exps)
    if (e < 0) throw DimensionMismatch("negative exponent");
  auto it = terms_.find(exps);
  if (it == terms_.end()) {
    if (c != cplx(0.0)) terms_.emplace(std::move(exps), c);
  } else {
    it->second += c;
    if (it->second == cplx(0.0)) terms_.erase(it);
  }
}

namespace {

// Horner evaluation over the first remaining variable, recursing on the rest.
cplx eval_group(const std::vector<std::pair<const std::vector<int>*, cplx>>& terms, int var,
                int n, const std::vector<cplx>& z) {
  if (terms.empty()) return 0.0;
  if (var == n - 1) {
    // Single variable left: plain Horner on exponents of var.
    std::map<int, cplx> by_exp;
    for (const auto& [e, c] : terms) by_exp[(*e)[var]] += c;
    cplx acc = 0.0;
    int prev = -1;
    for (auto it = by_exp.rbegin(); it != by_exp.rend(); ++it) {
      if (prev >= 0)
        for (int k = it->first; k < prev; ++k) acc *= z[var];
      acc += it->second;
      prev = it->first;
    }
    for (int k = 0; k < prev; ++k) acc *= z[var];
    return acc;
  }
  std::map<int, std::vector<std::pair<const std::vector<int>*, cplx>>> groups;
  for (const auto& t : terms) groups[(*t.first)[var]].push_back(t);
  cplx acc = 0.0;
  int prev = -1;
  for (auto it = groups.rbegin(); it != groups.rend(); ++it) {
    if (prev >= 0)
      for (int k = it->first; k < prev; ++k) acc *= z[var];
    acc += eval_group(it->second, var + 1, n, z);
    prev = it->first;
  }
  for (int k = 0; k < prev; ++k) acc *= z[var];
  return acc;
}

}  // namespace

cplx MultiPoly::eval(const std::vector<cplx>& z) const {
  if (static_cast<int>(z.size()) != n_) throw DimensionMismatch("eval point length != n");
  std::vector<std::pair<const std::vector<int>*, cplx>> flat;
  flat.reserve(terms_.size());
  for (const auto& [e, c] : terms_) flat.emplace_back(&e, c);
  return eval_group(flat, 0, n_, z);
}

cplx MultiPoly::eval_real(const std::vector<double>& x) const {
  std::vector<cplx> z(x.begin(), x.end());
  return eval(z);
}

std::vector<MultiPoly> MultiPoly::gradient() const {
  std::vector<MultiPoly> g(n_, MultiPoly(n_));
  for (const auto& [e, c] : terms_) {
    for (int j = 0; j < n_; ++j) {
      if (e[j] == 0) continue;
      std::vector<int> d = e;
      d[j] -= 1;
      g[j].add_term(std::move(d), c * double(e[j]));
    }
  }
  return g;
}

MultiPoly MultiPoly::principal_part() const {
  int N = degree();
  MultiPoly top(n_);
  for (const auto& [e, c] : terms_)
    if (std::accumulate(e.begin(), e.end(), 0) == N) top.add_term(e, c);
  return top;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

struct Cursor {
  const std::string& s;
  size_t i = 0;
  bool done() const { return i >= s.size(); }
  char peek() const { return done() ? '\0' : s[i]; }
};

bool parse_number(Cursor& c, double& out) {
  const char* start = c.s.c_str() + c.i;
  char* end = nullptr;
  double v = std::strtod(start, &end);
  if (end == start) return false;
  // Reject "strtod ate an exponent-less 'e'" style surprises conservatively:
  c.i += static_cast<size_t>(end - start);
  out = v;
  return true;
}

}  // namespace

MultiPoly MultiPoly::parse(const std::string& text, int n) {
  std::string s;
  s.reserve(text.size());
  for (char ch : text)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
  MultiPoly P(n);
  Cursor c{s};
  bool first = true;
  while (!c.done()) {
    double sign = 1.0;
    if (c.peek() == '+' || c.peek() == '-') {
      sign = (c.peek() == '-') ? -1.0 : 1.0;
      ++c.i;
    } else if (!first) {
      throw ConfigError("polynomial parse error: expected '+' or '-' at position " +
                        std::to_string(c.i));
    }
    first = false;
    cplx coef = 1.0;
    bool have_coef = false;
    double re = 0.0;
    size_t save = c.i;
    if (parse_number(c, re)) {
      have_coef = true;
      if (c.peek() == 'i') {
        ++c.i;
        coef = cplx(0.0, re);
      } else if (c.peek() == '+' || c.peek() == '-') {
        size_t save2 = c.i;
        double im = 0.0;
        if (parse_number(c, im) && c.peek() == 'i') {
          ++c.i;
          coef = cplx(re, im);
        } else {
          c.i = save2;  // the sign starts the next term
          coef = cplx(re, 0.0);
        }
      } else {
        coef = cplx(re, 0.0);
      }
    } else if (c.peek() == 'i' && (c.i + 1 >= s.size() || s[c.i + 1] != 'x' || true)) {
      // bare "i" coefficient (followed by '*', 'x', '+', '-', or end)
      ++c.i;
      coef = cplx(0.0, 1.0);
      have_coef = true;
    } else {
      c.i = save;
    }
    if (c.peek() == '*') ++c.i;
    std::vector<int> exps(n, 0);
    bool have_var = false;
    while (c.peek() == 'x') {
      ++c.i;
      size_t start = c.i;
      while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.i;
      if (c.i == start) throw ConfigError("polynomial parse error: variable index expected");
      int var = std::stoi(s.substr(start, c.i - start));
      if (var < 1 || var > n)
        throw DimensionMismatch("variable x" + std::to_string(var) + " out of range for n=" +
                                std::to_string(n));
      int pw = 1;
      if (c.peek() == '^') {
        ++c.i;
        size_t ps = c.i;
        while (!c.done() && std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.i;
        if (c.i == ps) throw ConfigError("polynomial parse error: exponent expected");
        pw = std::stoi(s.substr(ps, c.i - ps));
      }
      exps[var - 1] += pw;
      have_var = true;
      if (c.peek() == '*') ++c.i;
    }
    if (!have_coef && !have_var)
      throw ConfigError("polynomial parse error: empty term at position " + std::to_string(c.i));
    P.add_term(std::move(exps), sign * coef);
  }
  return P;
}

std::string MultiPoly::format() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    if (c.imag() == 0.0) {
      os << c.real();
    } else if (c.imag() > 0) {
      os << c.real() << "+" << c.imag() << "i";
    } else {
      os << c.real() << "-" << -c.imag() << "i";
    }
    for (int j = 0; j < n_; ++j) {
      if (e[j] == 0) continue;
      os << " * x" << (j + 1);
      if (e[j] > 1) os << "^" << e[j];
    }
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Line restriction

cplx LineRestriction::eval(cplx tau) const {
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * tau + *it;
  return acc;
}

cplx LineRestriction::deriv(cplx tau) const {
  cplx acc = 0.0;
  for (size_t k = coeffs.size(); k-- > 1;) acc = acc * tau + double(k) * coeffs[k];
  return acc;
}

std::vector<cplx> compose_line(const MultiPoly& P, const std::vector<cplx>& a,
                               const std::vector<cplx>& b) {
  if (static_cast<int>(a.size()) != P.n() || static_cast<int>(b.size()) != P.n())
    throw DimensionMismatch("compose_line: vector length != n");
  int N = P.degree();
  std::vector<cplx> out(static_cast<size_t>(N) + 1, 0.0);
  std::vector<cplx> mono, next;
  for (const auto& [e, c] : P.terms()) {
    mono.assign(1, c);
    for (int j = 0; j < P.n(); ++j) {
      for (int r = 0; r < e[j]; ++r) {
        next.assign(mono.size() + 1, 0.0);
        for (size_t k = 0; k < mono.size(); ++k) {
          next[k] += mono[k] * b[j];
          next[k + 1] += mono[k] * a[j];
        }
        mono.swap(next);
      }
    }
    for (size_t k = 0; k < mono.size(); ++k) out[k] += mono[k];
  }
  return out;
}

MultiPoly compose_linear(const MultiPoly& P, const std::vector<std::vector<double>>& M) {
  int n = P.n();
  if (static_cast<int>(M.size()) != n) throw DimensionMismatch("compose_linear: bad matrix");
  // Substitute xi_j -> row j of M applied to the new variables, expanding
  // term by term: c * prod_j (sum_a M[j][a] y_a)^{e_j}.
  MultiPoly out(n);
  using TM = std::map<std::vector<int>, cplx, GradedLex>;
  for (const auto& [e, c] : P.terms()) {
    TM acc;
    acc[std::vector<int>(n, 0)] = c;
    for (int j = 0; j < n; ++j) {
      for (int r = 0; r < e[j]; ++r) {
        TM next;
        for (const auto& [ex, cf] : acc) {
          for (int a = 0; a < n; ++a) {
            if (M[j][a] == 0.0) continue;
            std::vector<int> ex2 = ex;
            ++ex2[a];
            next[ex2] += cf * M[j][a];
          }
        }
        acc.swap(next);
      }
    }
    for (const auto& [ex, cf] : acc) out.add_term(ex, cf);
  }
  return out;
}

LineRestriction restrict_to_line(const MultiPoly& P, const std::vector<double>& theta,
                                 const std::vector<double>& xi_perp) {
  if (static_cast<int>(theta.size()) != P.n() || static_cast<int>(xi_perp.size()) != P.n())
    throw DimensionMismatch("restrict_to_line: vector length != n");
  double nrm = 0.0, dot = 0.0;
  for (int j = 0; j < P.n(); ++j) {
    nrm += theta[j] * theta[j];
    dot += theta[j] * xi_perp[j];
  }
  if (std::abs(nrm - 1.0) > 1e-10) throw DimensionMismatch("restrict_to_line: theta not unit");
  if (std::abs(dot) > 1e-12 * (1.0 + std::sqrt(nrm)))
    throw DimensionMismatch("restrict_to_line: xi_perp not orthogonal to theta");
  LineRestriction lr;
  lr.theta = theta;
  lr.xi_perp = xi_perp;
  std::vector<cplx> a(theta.begin(), theta.end()), b(xi_perp.begin(), xi_perp.end());
  lr.coeffs = compose_line(P, a, b);
  double mx = 0.0;
  for (const cplx& c : lr.coeffs) mx = std::max(mx, std::abs(c));
  lr.degenerate_leading = lr.coeffs.empty() || std::abs(lr.coeffs.back()) <= 1e-14 * mx;
  return lr;
}

// ---------------------------------------------------------------------------
// Discriminant

namespace {

std::vector<cplx> trim_coeffs(const std::vector<cplx>& coeffs) {
  double mx = 0.0;
  for (const cplx& c : coeffs) mx = std::max(mx, std::abs(c));
  std::vector<cplx> t = coeffs;
  while (t.size() > 1 && std::abs(t.back()) <= 1e-14 * mx) t.pop_back();
  return t;
}

cplx sylvester_resultant(const std::vector<cplx>& p, const std::vector<cplx>& q) {
  int dp = static_cast<int>(p.size()) - 1;
  int dq = static_cast<int>(q.size()) - 1;
  int m = dp + dq;
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(m, m);
  for (int r = 0; r < dq; ++r)
    for (int k = 0; k <= dp; ++k) S(r, r + dp - k) = p[k];
  for (int r = 0; r < dp; ++r)
    for (int k = 0; k <= dq; ++k) S(dq + r, r + dq - k) = q[k];
  return S.fullPivLu().determinant();
}

}  // namespace

cplx discriminant_coeffs(const std::vector<cplx>& coeffs) {
  std::vector<cplx> p = trim_coeffs(coeffs);
  int N = static_cast<int>(p.size()) - 1;
  if (N < 1) throw DegenerateLine("discriminant of a degree-0 restriction");
  if (N == 1) return p[1];
  std::vector<cplx> dp(p.size() - 1);
  for (size_t k = 1; k < p.size(); ++k) dp[k - 1] = double(k) * p[k];
  cplx res = sylvester_resultant(p, dp);
  double sgn = (((N * (N - 1)) / 2) % 2 == 0) ? 1.0 : -1.0;
  cplx disc = sgn * res / p.back();

  // Cross-check against the root-product formula away from clustered roots.
  RootSet rs = roots_of_coeffs(p);
  double min_sep = 1e300;
  for (size_t i = 0; i < rs.roots.size(); ++i)
    for (size_t j = i + 1; j < rs.roots.size(); ++j)
      min_sep = std::min(min_sep, std::abs(rs.roots[i] - rs.roots[j]));
  cplx prod = std::pow(p.back(), 2 * (N - 1));
  for (size_t i = 0; i < rs.roots.size(); ++i)
    for (size_t j = i + 1; j < rs.roots.size(); ++j) {
      cplx d = rs.roots[i] - rs.roots[j];
      prod *= d * d;
    }
  double scale = std::max(std::abs(disc), std::abs(prod));
  if (min_sep > 1e-4) {
    if (std::abs(disc - prod) > 1e-8 * std::max(scale, 1e-300) && scale > 0)
      throw Error(ErrorClass::Solver, "discriminant dual-route mismatch");
  } else if (scale > 0 && std::abs(disc - prod) > 1e-4 * scale) {
    std::cerr << "[simplechar] warning: discriminant cross-check skipped near clustered roots\n";
  }
  return disc;
}

cplx discriminant_line(const LineRestriction& p) { return discriminant_coeffs(p.coeffs); }

// ---------------------------------------------------------------------------
// Second-order normal form

cplx NormalForm2::Qk(int k, const std::vector<double>& eta) const {
  cplx acc = b;
  for (int j = 0; j < n; ++j) {
    if (j == k) continue;
    if (eps[j] != 0) {
      cplx t = cplx(0.0, eta[j]) - beta[j];
      acc += double(eps[j]) * t * t;
    } else {
      acc += 2.0 * alpha[j] * cplx(0.0, eta[j]);
    }
  }
  return acc;
}

cplx NormalForm2::eval_normal(const std::vector<cplx>& eta) const {
  cplx acc = b;
  for (int j = 0; j < n; ++j) {
    if (eps[j] != 0) {
      cplx t = cplx(0.0, 1.0) * eta[j] - beta[j];
      acc += double(eps[j]) * t * t;
    } else {
      acc += 2.0 * alpha[j] * cplx(0.0, 1.0) * eta[j];
    }
  }
  return acc;
}

std::vector<double> NormalForm2::to_normal(const std::vector<double>& xi) const {
  std::vector<double> eta(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double d = 0.0;
    for (int i = 0; i < n; ++i) d += basis[i][j] * xi[i];
    eta[j] = scale[j] * d;
  }
  return eta;
}

bool NormalForm2::axis_aligned(double tol) const {
  for (int j = 0; j < n; ++j) {
    if (std::abs(scale[j] - 1.0) > tol) return false;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      double v = std::abs(basis[i][j]);
      if (v > tol && std::abs(v - 1.0) > tol) return false;
      if (std::abs(v - 1.0) <= tol) ++hits;
    }
    if (hits != 1) return false;
  }
  return true;
}

NormalForm2 normalize_second_order(const MultiPoly& P) {
  int n = P.n();
  if (P.degree() != 2) throw ConfigError("normalize_second_order: symbol degree != 2");
  Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd lin = Eigen::VectorXd::Zero(n);
  double B = 0.0;
  double mx = P.max_coeff_mag();
  for (const auto& [e, c] : P.terms()) {
    int deg = std::accumulate(e.begin(), e.end(), 0);
    if (deg == 2) {
      if (std::abs(c.imag()) > 1e-12 * mx)
        throw ConfigError("normalize_second_order: non-real quadratic coefficient");
      int i = -1, j = -1;
      for (int v = 0; v < n; ++v) {
        if (e[v] == 2) i = j = v;
        if (e[v] == 1) (i < 0 ? i : j) = v;
      }
      if (i == j)
        Q(i, i) += c.real();
      else {
        Q(i, j) += c.real() / 2.0;
        Q(j, i) += c.real() / 2.0;
      }
    } else if (deg == 1) {
      if (std::abs(c.real()) > 1e-12 * mx)
        throw ConfigError("normalize_second_order: first-order coefficient not imaginary "
                          "(operator would have non-real coefficients)");
      int v = 0;
      while (e[v] == 0) ++v;
      lin(v) += c.imag();  // symbol linear part = 2i alpha . xi
    } else {
      if (std::abs(c.imag()) > 1e-12 * mx)
        throw ConfigError("normalize_second_order: non-real constant term");
      B += c.real();
    }
  }
  Eigen::MatrixXd A = -Q;  // operator quadratic form: P2(xi) = -xi^T A xi
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw Error(ErrorClass::Solver, "normalize_second_order: eigensolve failed");

  NormalForm2 nf;
  nf.n = n;
  nf.eps.assign(n, 0);
  nf.alpha.assign(n, 0.0);
  nf.beta.assign(n, 0.0);
  nf.scale.assign(n, 1.0);
  nf.basis.assign(n, std::vector<double>(n, 0.0));
  nf.Bconst = B;
  double lmax = es.eigenvalues().cwiseAbs().maxCoeff();
  // Prefer the identity basis when A is already diagonal (deterministic,
  // keeps presets axis-aligned regardless of eigenvector sign conventions).
  bool diagA = true;
  for (int i = 0; i < n && diagA; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && std::abs(A(i, j)) > 1e-14 * std::max(lmax, 1.0)) {
        diagA = false;
        break;
      }
  Eigen::MatrixXd E(n, n);
  Eigen::VectorXd lam(n);
  if (diagA) {
    E = Eigen::MatrixXd::Identity(n, n);
    lam = A.diagonal();
  } else {
    E = es.eigenvectors();
    lam = es.eigenvalues();
  }
  double alpha_scale = 0.5;  // symbol linear coeff = 2i alpha => alpha = Im/2
  for (int j = 0; j < n; ++j) {
    double l = lam(j);
    double aj = 0.0;
    for (int i = 0; i < n; ++i) {
      nf.basis[i][j] = E(i, j);
      aj += E(i, j) * lin(i) * alpha_scale;
    }
    if (std::abs(l) <= 1e-12 * std::max(lmax, 1.0)) {
      nf.eps[j] = 0;
      nf.scale[j] = 1.0;
      nf.alpha[j] = aj;
    } else {
      nf.eps[j] = (l > 0) ? 1 : -1;
      nf.scale[j] = std::sqrt(std::abs(l));
      nf.alpha[j] = aj / nf.scale[j];
      nf.beta[j] = -double(nf.eps[j]) * nf.alpha[j];
    }
  }
  nf.b = B;
  for (int j = 0; j < n; ++j)
    if (nf.eps[j] != 0) nf.b -= double(nf.eps[j]) * nf.beta[j] * nf.beta[j];
  return nf;
}

// ---------------------------------------------------------------------------
// Nonsingularity sampling

NonsingularReport is_nonsingular_sampled(const MultiPoly& P,
                                         const std::vector<std::vector<cplx>>& samples,
                                         double tol, double grad_tol) {
  if (samples.empty()) throw ConfigError("is_nonsingular_sampled: no samples");
  auto grad = P.gradient();
  NonsingularReport rep;
  rep.samples = static_cast<int>(samples.size());
  rep.min_grad = std::numeric_limits<double>::infinity();
  double scale = std::max(P.max_coeff_mag(), 1.0);
  for (auto z : samples) {
    // Newton projection toward the variety: z -= P(z) conj(g)/|g|^2.
    for (int it = 0; it < 12; ++it) {
      cplx v = P.eval(z);
      if (std::abs(v) < 1e-2 * tol * scale) break;
      double g2 = 0.0;
      std::vector<cplx> g(P.n());
      for (int j = 0; j < P.n(); ++j) {
        g[j] = grad[j].eval(z);
        g2 += std::norm(g[j]);
      }
      if (g2 < 1e-30) break;
      for (int j = 0; j < P.n(); ++j) z[j] -= v * std::conj(g[j]) / g2;
    }
    if (std::abs(P.eval(z)) < tol * scale) {
      double gn = 0.0;
      for (int j = 0; j < P.n(); ++j) gn += std::norm(grad[j].eval(z));
      gn = std::sqrt(gn);
      ++rep.near_variety;
      rep.min_grad = std::min(rep.min_grad, gn);
      if (gn < grad_tol) ++rep.violations;
    }
  }
  rep.no_violation_found = (rep.violations == 0);
  return rep;
}

}  // namespace simplechar
