#pragma once

#include <complex>
#include <string>
#include <vector>

#include "simplechar/errors.hpp"

namespace simplechar {

using cplx = std::complex<double>;

enum class Space : int { Physical = 0, Frequency = 1, Mixed = 2 };

/// Complex samples on a uniform n-dimensional box grid [-L_i/2, L_i/2),
/// row-major. The frequency grid is the standard DFT dual (spacing 2pi/L_i,
/// FFT index order). Transforms use the unitary continuum convention:
/// forward carries h/sqrt(2pi) per axis, so Plancherel holds exactly.
struct GridField {
  int n = 0;
  std::vector<int> dims;
  std::vector<double> box;  ///< L_i per axis
  Space space = Space::Physical;
  int mixed_axis = -1;  ///< retained physical axis when space == Mixed
  std::vector<cplx> data;

  static GridField zeros(std::vector<int> dims, std::vector<double> box,
                         Space s = Space::Physical, int mixed_axis = -1);

  size_t size() const { return data.size(); }
  double h(int axis) const { return box[axis] / dims[axis]; }
  double dxi(int axis) const;
  /// Physical coordinate of index j along axis: -L/2 + j h.
  double coord(int axis, int j) const { return -0.5 * box[axis] + j * h(axis); }
  /// Frequency 2pi m/L with the usual wrap m = j or j - N.
  double freq(int axis, int j) const;
  size_t stride(int axis) const;
  size_t flat(const std::vector<int>& idx) const;
  void unflat(size_t f, std::vector<int>& idx) const;
  /// Integration weight of one cell along axis in the field's current space.
  double cell_weight(int axis) const;
  /// Product of per-axis cell weights.
  double cell_volume() const;
  double l2() const;
  GridField& operator+=(const GridField& o);
  GridField& operator*=(cplx s);
};

GridField dft_full(const GridField& f);
GridField idft_full(const GridField& F);
/// Transforms all axes except `axis`; result has space = Mixed(axis).
GridField partial_dft(const GridField& f, int axis);
GridField ipartial_dft(const GridField& g);
/// Transforms the retained axis of a mixed field, completing the full DFT.
GridField dft_mixed_axis(const GridField& g);

/// Trigonometric (FFT shear) resampling of f onto the rotated grid:
/// returns g with g(x) = f(R^{-1} x). Requires physical space and a guard
/// band: |f| below 1e-9 of max outside the central half of the box.
/// If residual_out is non-null it receives the round-trip relative L2 error
/// ||f - rotate(R^{-1}, rotate(R, f))|| / ||f||.
GridField rotate_resample(const GridField& f, const std::vector<std::vector<double>>& R,
                          double* residual_out = nullptr, bool enforce_guard = true);

/// Mixed norm Theta(p,q): inner L^p over the retained t axis, outer L^q over
/// the perpendicular frequencies. p, q in [1, inf]; pass
/// std::numeric_limits<double>::infinity() for sup.
double mixed_norm(const GridField& f, double p, double q);

struct Ball {
  std::vector<double> center;
  double R = 0.0;
};

struct DomainSpec {
  enum class Kind { Ball, Box, UnionOfBalls } kind = Kind::Ball;
  Ball ball;
  std::vector<double> lo, hi;  ///< for Box
  std::vector<Ball> balls;     ///< for UnionOfBalls

  static DomainSpec make_ball(std::vector<double> center, double R);
  static DomainSpec make_box(std::vector<double> lo, std::vector<double> hi);
  static DomainSpec make_union(std::vector<Ball> balls);
  bool contains(const std::vector<double>& x) const;
};

/// sqrt( sum |f|^2 * cell volume ) over cells whose centers lie in D.
double l2_on_domain(const GridField& f, const DomainSpec& D);
/// L^p variant used by the mixed-norm lemma's L^q corollaries.
double lp_on_domain(const GridField& f, const DomainSpec& D, double p);

/// sup over lines of the length of the line's intersection with D:
/// ball -> 2R; box -> main diagonal; unionOfBalls -> line search over pair
/// lines and coordinate axes (certified lower bound).
double diameter(const DomainSpec& D);
/// Extent of D's cell set projected onto an axis, in whole cells; the
/// discrete stand-in for the diameter in axis-direction inequalities.
double axis_extent_cells(const GridField& f, const DomainSpec& D, int axis);

void write_field(const std::string& path, const GridField& f);
GridField read_field(const std::string& path);
void write_fields(const std::string& path, const std::vector<GridField>& fs);
std::vector<GridField> read_fields(const std::string& path);

}  // namespace simplechar
