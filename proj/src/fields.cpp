#include "simplechar/fields.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>

namespace simplechar {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

GridField GridField::zeros(std::vector<int> dims, std::vector<double> box, Space s,
                           int mixed_axis) {
  GridField f;
  f.n = static_cast<int>(dims.size());
  if (f.n < 1 || box.size() != dims.size())
    throw DimensionMismatch("GridField: dims/box length mismatch");
  for (int d : dims)
    if (d < 2 || (d & (d - 1)) != 0) throw ConfigError("GridField: dims must be powers of two");
  f.dims = std::move(dims);
  f.box = std::move(box);
  f.space = s;
  f.mixed_axis = (s == Space::Mixed) ? mixed_axis : -1;
  size_t sz = 1;
  for (int d : f.dims) sz *= static_cast<size_t>(d);
  f.data.assign(sz, cplx(0.0));
  return f;
}

double GridField::dxi(int axis) const { return 2.0 * kPi / box[axis]; }

double GridField::freq(int axis, int j) const {
  int m = (j < dims[axis] / 2) ? j : j - dims[axis];
  return dxi(axis) * m;
}

size_t GridField::stride(int axis) const {
  size_t s = 1;
  for (int a = axis + 1; a < n; ++a) s *= static_cast<size_t>(dims[a]);
  return s;
}

size_t GridField::flat(const std::vector<int>& idx) const {
  size_t f = 0;
  for (int a = 0; a < n; ++a) f = f * dims[a] + idx[a];
  return f;
}

void GridField::unflat(size_t f, std::vector<int>& idx) const {
  idx.resize(n);
  for (int a = n - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(f % dims[a]);
    f /= dims[a];
  }
}

double GridField::cell_weight(int axis) const {
  switch (space) {
    case Space::Physical: return h(axis);
    case Space::Frequency: return dxi(axis);
    case Space::Mixed: return (axis == mixed_axis) ? h(axis) : dxi(axis);
  }
  return 0.0;
}

double GridField::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < n; ++a) v *= cell_weight(a);
  return v;
}

double GridField::l2() const {
  double s = 0.0;
  for (const cplx& z : data) s += std::norm(z);
  return std::sqrt(s * cell_volume());
}

GridField& GridField::operator+=(const GridField& o) {
  if (o.dims != dims || o.space != space || o.mixed_axis != mixed_axis)
    throw GridMismatch("GridField +=: incompatible grids");
  for (size_t i = 0; i < data.size(); ++i) data[i] += o.data[i];
  return *this;
}

GridField& GridField::operator*=(cplx s) {
  for (cplx& z : data) z *= s;
  return *this;
}

// ---------------------------------------------------------------------------
// Axis transforms (FFTW, gather/scatter per line, cached plans)

namespace {

std::mutex g_plan_mutex;

fftw_plan get_plan(int N, int sign) {
  static std::map<std::pair<int, int>, std::pair<fftw_plan, fftw_complex*>> cache;
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto key = std::make_pair(N, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second.first;
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(N));
  fftw_plan plan = fftw_plan_dft_1d(N, buf, buf, sign, FFTW_ESTIMATE);
  cache.emplace(key, std::make_pair(plan, buf));
  return plan;
}

/// In-place continuum-convention transform along one axis.
/// forward: F_m = (h/sqrt(2pi)) (-1)^m sum_j f_j e^{-2pi i jm/N}
/// inverse: f_j = (dxi/sqrt(2pi)) sum_m (-1)^m F_m e^{+2pi i jm/N}
void axis_transform(GridField& f, int axis, bool forward) {
  const int N = f.dims[axis];
  fftw_plan plan = get_plan(N, forward ? FFTW_FORWARD : FFTW_BACKWARD);
  fftw_complex* buf = fftw_alloc_complex(static_cast<size_t>(N));
  cplx* cbuf = reinterpret_cast<cplx*>(buf);
  const size_t str = f.stride(axis);
  const size_t nlines = f.size() / N;
  const double scale = (forward ? f.h(axis) : f.dxi(axis)) / std::sqrt(2.0 * kPi);
  for (size_t line = 0; line < nlines; ++line) {
    const size_t inner = line % str;
    const size_t outer = line / str;
    const size_t base = outer * (str * N) + inner;
    for (int j = 0; j < N; ++j) cbuf[j] = f.data[base + j * str];
    if (!forward)
      for (int j = 1; j < N; j += 2) cbuf[j] = -cbuf[j];
    fftw_execute_dft(plan, buf, buf);
    if (forward)
      for (int j = 1; j < N; j += 2) cbuf[j] = -cbuf[j];
    for (int j = 0; j < N; ++j) f.data[base + j * str] = scale * cbuf[j];
  }
  fftw_free(buf);
}

}  // namespace

GridField dft_full(const GridField& f) {
  if (f.space != Space::Physical) throw ConfigError("dft_full: field not in physical space");
  GridField F = f;
  for (int a = 0; a < f.n; ++a) axis_transform(F, a, true);
  F.space = Space::Frequency;
  return F;
}

GridField idft_full(const GridField& F) {
  if (F.space != Space::Frequency) throw ConfigError("idft_full: field not in frequency space");
  GridField f = F;
  for (int a = 0; a < F.n; ++a) axis_transform(f, a, false);
  f.space = Space::Physical;
  return f;
}

GridField partial_dft(const GridField& f, int axis) {
  if (f.space != Space::Physical) throw ConfigError("partial_dft: field not in physical space");
  if (axis < 0 || axis >= f.n) throw DimensionMismatch("partial_dft: invalid axis");
  GridField g = f;
  for (int a = 0; a < f.n; ++a)
    if (a != axis) axis_transform(g, a, true);
  g.space = Space::Mixed;
  g.mixed_axis = axis;
  return g;
}

GridField ipartial_dft(const GridField& g) {
  if (g.space != Space::Mixed) throw ConfigError("ipartial_dft: field not in mixed space");
  GridField f = g;
  for (int a = 0; a < g.n; ++a)
    if (a != g.mixed_axis) axis_transform(f, a, false);
  f.space = Space::Physical;
  f.mixed_axis = -1;
  return f;
}

GridField dft_mixed_axis(const GridField& g) {
  if (g.space != Space::Mixed) throw ConfigError("dft_mixed_axis: field not in mixed space");
  GridField F = g;
  axis_transform(F, g.mixed_axis, true);
  F.space = Space::Frequency;
  F.mixed_axis = -1;
  return F;
}

// ---------------------------------------------------------------------------
// Rotation by FFT shears

namespace {

bool is_signed_permutation(const std::vector<std::vector<double>>& R, int n,
                           std::vector<int>& col_of_row, std::vector<int>& sign_of_row,
                           double tol = 1e-12) {
  col_of_row.assign(n, -1);
  sign_of_row.assign(n, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double v = R[i][j];
      if (std::abs(v) <= tol) continue;
      if (std::abs(std::abs(v) - 1.0) > tol) return false;
      if (col_of_row[i] != -1) return false;
      col_of_row[i] = j;
      sign_of_row[i] = (v > 0) ? 1 : -1;
    }
    if (col_of_row[i] == -1) return false;
  }
  return true;
}

/// g(x) = f(R^T x) for a signed permutation R (exact sample relabeling).
GridField apply_signed_permutation(const GridField& f, const std::vector<int>& col_of_row,
                                   const std::vector<int>& sign_of_row) {
  const int n = f.n;
  // y = R^T x: y_{col_of_row[i]} = sign_of_row[i] * x_i.
  for (int i = 0; i < n; ++i) {
    int j = col_of_row[i];
    if (i != j && (f.dims[i] != f.dims[j] || f.box[i] != f.box[j]))
      throw GridMismatch("rotate_resample: permutation between unequal axes");
  }
  GridField g = f;
  std::vector<int> out(n), in(n);
  for (size_t fl = 0; fl < f.size(); ++fl) {
    g.unflat(fl, out);
    for (int i = 0; i < n; ++i) {
      int j = col_of_row[i];
      in[j] = (sign_of_row[i] > 0) ? out[i] : (f.dims[j] - out[i]) % f.dims[j];
    }
    g.data[fl] = f.data[f.flat(in)];
  }
  return g;
}

/// Translate every line along axis A by delta = a * coord(B): the shear
/// [[1,a],[0,1]] in the (A,B) plane, exact for band-limited data.
void shear_axis(GridField& f, int A, int B, double a) {
  if (a == 0.0) return;
  axis_transform(f, A, true);
  std::vector<int> idx(f.n);
  for (size_t fl = 0; fl < f.size(); ++fl) {
    f.unflat(fl, idx);
    double delta = a * f.coord(B, idx[B]);
    double xi = f.freq(A, idx[A]);
    f.data[fl] *= std::polar(1.0, -xi * delta);
  }
  axis_transform(f, A, false);
}

std::vector<std::vector<double>> plane_rotation(int n, int p, int q, double ang) {
  std::vector<std::vector<double>> M(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i) M[i][i] = 1.0;
  double c = std::cos(ang), s = std::sin(ang);
  M[p][p] = c;
  M[p][q] = -s;
  M[q][p] = s;
  M[q][q] = c;
  return M;
}

void rotate_plane(GridField& f, int p, int q, double ang) {
  while (ang > kPi) ang -= 2.0 * kPi;
  while (ang <= -kPi) ang += 2.0 * kPi;
  int k = static_cast<int>(std::lround(ang / (kPi / 2.0)));
  double r = ang - k * (kPi / 2.0);
  if (k != 0) {
    auto Q = plane_rotation(f.n, p, q, k * kPi / 2.0);
    for (auto& row : Q)
      for (double& v : row) v = std::round(v);
    std::vector<int> col, sgn;
    if (!is_signed_permutation(Q, f.n, col, sgn))
      throw Error(ErrorClass::Solver, "rotate_plane: internal quarter-turn failure");
    f = apply_signed_permutation(f, col, sgn);
  }
  if (std::abs(r) > 1e-15) {
    double a = -std::tan(r / 2.0), b = std::sin(r);
    shear_axis(f, p, q, a);
    shear_axis(f, q, p, b);
    shear_axis(f, p, q, a);
  }
}

void check_guard_band(const GridField& f) {
  double lmin = *std::min_element(f.box.begin(), f.box.end());
  double rad = 0.375 * lmin;
  double mx = 0.0, mx_out = 0.0;
  std::vector<int> idx(f.n);
  for (size_t fl = 0; fl < f.size(); ++fl) {
    double m = std::abs(f.data[fl]);
    mx = std::max(mx, m);
    if (m > mx_out) {
      f.unflat(fl, idx);
      double r2 = 0.0;
      for (int a = 0; a < f.n; ++a) {
        double x = f.coord(a, idx[a]);
        r2 += x * x;
      }
      if (r2 > rad * rad) mx_out = m;
    }
  }
  if (mx > 0 && mx_out > 1e-9 * mx)
    throw ConfigError("rotate_resample: insufficient guard band (support reaches the "
                      "outer quarter of the box)");
}

GridField rotate_nocheck(const GridField& f, const std::vector<std::vector<double>>& R) {
  const int n = f.n;
  std::vector<int> col, sgn;
  if (is_signed_permutation(R, n, col, sgn)) return apply_signed_permutation(f, col, sgn);
  // Orthogonality, det +1.
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double d = 0.0;
      for (int k = 0; k < n; ++k) d += R[k][i] * R[k][j];
      if (std::abs(d - (i == j ? 1.0 : 0.0)) > 1e-10)
        throw ConfigError("rotate_resample: matrix not orthogonal");
    }
  GridField g = f;
  if (n == 2) {
    double det = R[0][0] * R[1][1] - R[0][1] * R[1][0];
    double ang = std::atan2(R[1][0], R[0][0]);
    if (det < 0) throw ConfigError("rotate_resample: reflections unsupported");
    rotate_plane(g, 0, 1, ang);
    return g;
  }
  if (n != 3) throw ConfigError("rotate_resample: general rotations supported for n in {2,3}");
  // Euler zyz: R = rot01(alpha) rot20(beta) rot01(gamma); rightmost acts first.
  double c = std::clamp(R[2][2], -1.0, 1.0);
  double beta = std::acos(c), alpha, gamma;
  if (std::sin(beta) > 1e-12) {
    alpha = std::atan2(R[1][2], R[0][2]);
    gamma = std::atan2(R[2][1], -R[2][0]);
  } else if (c > 0) {
    beta = 0.0;
    gamma = 0.0;
    alpha = std::atan2(R[1][0], R[0][0]);
  } else {
    beta = kPi;
    gamma = 0.0;
    alpha = std::atan2(-R[1][0], -R[0][0]);
  }
  rotate_plane(g, 0, 1, gamma);
  rotate_plane(g, 2, 0, beta);
  rotate_plane(g, 0, 1, alpha);
  return g;
}

}  // namespace

GridField rotate_resample(const GridField& f, const std::vector<std::vector<double>>& R,
                          double* residual_out, bool enforce_guard) {
  if (f.space != Space::Physical) throw ConfigError("rotate_resample: field not physical");
  if (static_cast<int>(R.size()) != f.n) throw DimensionMismatch("rotate_resample: bad matrix");
  if (enforce_guard) check_guard_band(f);
  GridField g = rotate_nocheck(f, R);
  if (residual_out) {
    std::vector<std::vector<double>> Rt(f.n, std::vector<double>(f.n));
    for (int i = 0; i < f.n; ++i)
      for (int j = 0; j < f.n; ++j) Rt[i][j] = R[j][i];
    GridField back = rotate_nocheck(g, Rt);
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < f.size(); ++i) {
      num += std::norm(f.data[i] - back.data[i]);
      den += std::norm(f.data[i]);
    }
    *residual_out = (den > 0) ? std::sqrt(num / den) : 0.0;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Mixed norms

double mixed_norm(const GridField& f, double p, double q) {
  if (f.space != Space::Mixed) throw ConfigError("mixed_norm: field not in mixed space");
  if (p < 1.0 || q < 1.0) throw ConfigError("mixed_norm: exponents must be >= 1");
  const int ax = f.mixed_axis;
  const int N = f.dims[ax];
  const size_t str = f.stride(ax);
  const size_t nlines = f.size() / N;
  const double ht = f.h(ax);
  double wperp = 1.0;
  for (int a = 0; a < f.n; ++a)
    if (a != ax) wperp *= f.dxi(a);
  double outer = 0.0;  // sum for finite q, max for q = inf
  for (size_t line = 0; line < nlines; ++line) {
    const size_t inner = line % str;
    const size_t base = (line / str) * (str * N) + inner;
    double in = 0.0;
    if (p == kInf) {
      for (int j = 0; j < N; ++j) in = std::max(in, std::abs(f.data[base + j * str]));
    } else {
      for (int j = 0; j < N; ++j) in += std::pow(std::abs(f.data[base + j * str]), p);
      in = std::pow(in * ht, 1.0 / p);
    }
    if (q == kInf)
      outer = std::max(outer, in);
    else
      outer += std::pow(in, q);
  }
  if (q == kInf) return outer;
  return std::pow(outer * wperp, 1.0 / q);
}

// ---------------------------------------------------------------------------
// Domains

DomainSpec DomainSpec::make_ball(std::vector<double> center, double R) {
  if (R <= 0) throw ConfigError("ball radius must be positive");
  DomainSpec d;
  d.kind = Kind::Ball;
  d.ball = Ball{std::move(center), R};
  return d;
}

DomainSpec DomainSpec::make_box(std::vector<double> lo, std::vector<double> hi) {
  DomainSpec d;
  d.kind = Kind::Box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  for (size_t i = 0; i < d.lo.size(); ++i)
    if (d.hi[i] <= d.lo[i]) throw ConfigError("box must have positive extents");
  return d;
}

DomainSpec DomainSpec::make_union(std::vector<Ball> balls) {
  if (balls.empty()) throw ConfigError("unionOfBalls must be nonempty");
  for (const Ball& b : balls)
    if (b.R <= 0) throw ConfigError("ball radius must be positive");
  DomainSpec d;
  d.kind = Kind::UnionOfBalls;
  d.balls = std::move(balls);
  return d;
}

namespace {
bool in_ball(const Ball& b, const std::vector<double>& x) {
  double r2 = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - b.center[i];
    r2 += d * d;
  }
  return r2 <= b.R * b.R;
}
}  // namespace

bool DomainSpec::contains(const std::vector<double>& x) const {
  switch (kind) {
    case Kind::Ball: return in_ball(ball, x);
    case Kind::Box:
      for (size_t i = 0; i < x.size(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
      return true;
    case Kind::UnionOfBalls:
      for (const Ball& b : balls)
        if (in_ball(b, x)) return true;
      return false;
  }
  return false;
}

double l2_on_domain(const GridField& f, const DomainSpec& D) {
  return lp_on_domain(f, D, 2.0);
}

double lp_on_domain(const GridField& f, const DomainSpec& D, double p) {
  if (f.space != Space::Physical) throw ConfigError("lp_on_domain: field not physical");
  double vol = 1.0;
  for (int a = 0; a < f.n; ++a) vol *= f.h(a);
  std::vector<int> idx(f.n);
  std::vector<double> x(f.n);
  double s = 0.0;
  for (size_t fl = 0; fl < f.size(); ++fl) {
    f.unflat(fl, idx);
    for (int a = 0; a < f.n; ++a) x[a] = f.coord(a, idx[a]);
    if (D.contains(x)) s += std::pow(std::abs(f.data[fl]), p);
  }
  return std::pow(s * vol, 1.0 / p);
}

namespace {

double chord_sum(const std::vector<Ball>& balls, const std::vector<double>& anchor,
                 const std::vector<double>& dir) {
  double s = 0.0;
  for (const Ball& b : balls) {
    double t = 0.0, d2 = 0.0;
    for (size_t i = 0; i < dir.size(); ++i) t += (b.center[i] - anchor[i]) * dir[i];
    for (size_t i = 0; i < dir.size(); ++i) {
      double off = b.center[i] - anchor[i] - t * dir[i];
      d2 += off * off;
    }
    double rem = b.R * b.R - d2;
    if (rem > 0) s += 2.0 * std::sqrt(rem);
  }
  return s;
}

}  // namespace

double diameter(const DomainSpec& D) {
  switch (D.kind) {
    case DomainSpec::Kind::Ball: return 2.0 * D.ball.R;
    case DomainSpec::Kind::Box: {
      double s = 0.0;
      for (size_t i = 0; i < D.lo.size(); ++i) {
        double e = D.hi[i] - D.lo[i];
        s += e * e;
      }
      return std::sqrt(s);
    }
    case DomainSpec::Kind::UnionOfBalls: {
      const auto& bs = D.balls;
      size_t n = bs[0].center.size();
      double best = 0.0;
      auto consider = [&](const std::vector<double>& anchor, std::vector<double> dir) {
        double nrm = 0.0;
        for (double v : dir) nrm += v * v;
        if (nrm < 1e-30) return;
        nrm = std::sqrt(nrm);
        for (double& v : dir) v /= nrm;
        best = std::max(best, chord_sum(bs, anchor, dir));
      };
      for (size_t i = 0; i < bs.size(); ++i)
        for (size_t j = i + 1; j < bs.size(); ++j) {
          std::vector<double> dir(n);
          for (size_t a = 0; a < n; ++a) dir[a] = bs[j].center[a] - bs[i].center[a];
          consider(bs[i].center, dir);
        }
      for (const Ball& b : bs)
        for (size_t a = 0; a < n; ++a) {
          std::vector<double> dir(n, 0.0);
          dir[a] = 1.0;
          consider(b.center, dir);
        }
      return best;
    }
  }
  return 0.0;
}

double axis_extent_cells(const GridField& f, const DomainSpec& D, int axis) {
  if (f.space != Space::Physical) throw ConfigError("axis_extent_cells: field not physical");
  std::vector<int> idx(f.n);
  std::vector<double> x(f.n);
  std::vector<char> hit(f.dims[axis], 0);
  for (size_t fl = 0; fl < f.size(); ++fl) {
    f.unflat(fl, idx);
    if (hit[idx[axis]]) continue;
    for (int a = 0; a < f.n; ++a) x[a] = f.coord(a, idx[a]);
    if (D.contains(x)) hit[idx[axis]] = 1;
  }
  int count = 0;
  for (char c : hit) count += c;
  return count * f.h(axis);
}

}  // namespace simplechar
