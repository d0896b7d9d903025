#pragma once

#include <complex>
#include <map>
#include <string>
#include <vector>

#include "simplechar/errors.hpp"

namespace simplechar {

using cplx = std::complex<double>;

/// Graded lexicographic order on exponent multi-indices: total degree first,
/// then lexicographic. Fixes deterministic iteration and serialization.
struct GradedLex {
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const;
};

/// Sparse multivariate polynomial over complex coefficients; the symbol P(xi).
class MultiPoly {
 public:
  using TermMap = std::map<std::vector<int>, cplx, GradedLex>;

  explicit MultiPoly(int n);

  int n() const { return n_; }
  int degree() const;
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  double max_coeff_mag() const;

  /// Adds c * xi^exps, dropping the term if the accumulated coefficient is zero.
  void add_term(std::vector<int> exps, cplx c);

  cplx eval(const std::vector<cplx>& z) const;
  cplx eval_real(const std::vector<double>& x) const;

  /// Component j is dP/dxi_j, exact term-by-term differentiation.
  std::vector<MultiPoly> gradient() const;

  /// Keeps exactly the degree-N terms.
  MultiPoly principal_part() const;

  /// Text format: sum of terms "c * x1^a1 x2^a2 ..." with complex c as
  /// "re" or "re+imi"; whitespace-insensitive.
  static MultiPoly parse(const std::string& text, int n);
  std::string format() const;

 private:
  int n_;
  TermMap terms_;
};

/// The univariate restriction p(tau) = P(tau*Theta + xi_perp).
struct LineRestriction {
  std::vector<cplx> coeffs;      ///< c_0..c_N as stored (leading may be ~0)
  std::vector<double> theta;     ///< unit direction
  std::vector<double> xi_perp;   ///< base point in Theta-perp
  bool degenerate_leading = false;  ///< |c_N| tiny relative to max coefficient

  cplx eval(cplx tau) const;
  cplx deriv(cplx tau) const;
  int stored_degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

/// p(tau) = P(tau*a + b) for arbitrary complex a, b (no unit/perp checks);
/// used by the discriminant law tests where the direction may be complex.
std::vector<cplx> compose_line(const MultiPoly& P, const std::vector<cplx>& a,
                               const std::vector<cplx>& b);

/// Q(xi) = P(M xi) for a real linear map M (rows of M weight the new
/// variables); used to express a symbol in rotated coordinates.
MultiPoly compose_linear(const MultiPoly& P, const std::vector<std::vector<double>>& M);

/// Checked restriction: ||theta|| = 1 and theta . xi_perp = 0 within 1e-12.
LineRestriction restrict_to_line(const MultiPoly& P, const std::vector<double>& theta,
                                 const std::vector<double>& xi_perp);

/// disc_tau of the univariate polynomial given by coeffs (low to high, trimmed
/// internally). Degree 1 returns the leading coefficient; degree 0 throws
/// DegenerateLine. Computed by Sylvester resultant (authoritative) and
/// cross-checked against the root-product formula away from clustered roots.
cplx discriminant_coeffs(const std::vector<cplx>& coeffs);
cplx discriminant_line(const LineRestriction& p);

/// Second-order normal form: orthogonal change of coordinates plus rescaling
/// diagonalizes the quadratic part to signs eps_j; first-order terms absorbed
/// into completed squares beta_j with reduced constant b.
struct NormalForm2 {
  int n = 0;
  std::vector<int> eps;        ///< -1, 0, +1 per normal-form coordinate
  std::vector<double> alpha;   ///< first-order coefficients in normal coords
  double Bconst = 0.0;         ///< constant term of the input symbol
  std::vector<double> beta;    ///< completed-square shifts (-eps_j * alpha_j)
  double b = 0.0;              ///< Bconst - sum eps_j beta_j^2
  std::vector<std::vector<double>> basis;  ///< column j = eigenvector e_j
  std::vector<double> scale;   ///< sqrt|lambda_j| (1 for null directions)

  /// Q_k(eta) = sum_{j != k} eps_j (i eta_j - beta_j)^2 + b, eta in normal coords.
  cplx Qk(int k, const std::vector<double>& eta) const;
  /// Normal-form symbol p(eta), including 2*alpha_j*(i eta_j) on null axes.
  cplx eval_normal(const std::vector<cplx>& eta) const;
  /// Maps original-coordinate xi to normal coordinates eta_j = scale_j*(e_j.xi).
  std::vector<double> to_normal(const std::vector<double>& xi) const;
  /// True when basis is a signed permutation with unit scales (tolerance tol):
  /// the normal coordinates are the grid axes themselves.
  bool axis_aligned(double tol = 1e-10) const;
};

NormalForm2 normalize_second_order(const MultiPoly& P);

struct NonsingularReport {
  int samples = 0;
  int near_variety = 0;     ///< samples that Newton-projected onto |P| < tol
  double min_grad = 0.0;    ///< min |grad P| over near-variety samples
  int violations = 0;       ///< near-variety samples with |grad P| < grad_tol
  bool no_violation_found = true;
};

/// Sampled certification (never a proof) that P and grad P have no common zero.
NonsingularReport is_nonsingular_sampled(const MultiPoly& P,
                                         const std::vector<std::vector<cplx>>& samples,
                                         double tol, double grad_tol = 1e-6);

}  // namespace simplechar
