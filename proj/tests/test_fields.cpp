#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <limits>
#include <random>

#include "simplechar/fields.hpp"

using namespace simplechar;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

GridField random_field(std::vector<int> dims, std::vector<double> box, uint64_t seed) {
  GridField f = GridField::zeros(std::move(dims), std::move(box));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (auto& z : f.data) z = cplx(unif(rng), unif(rng));
  return f;
}

GridField gaussian_field(int N, double L, double w) {
  GridField f = GridField::zeros({N, N}, {L, L});
  std::vector<int> idx(2);
  for (size_t fl = 0; fl < f.size(); ++fl) {
    f.unflat(fl, idx);
    double x = f.coord(0, idx[0]), y = f.coord(1, idx[1]);
    f.data[fl] = std::exp(-(x * x + y * y) / (2.0 * w * w));
  }
  return f;
}

}  // namespace

TEST_CASE("full transform: round trip and Plancherel") {
  GridField f = random_field({32, 16}, {8.0, 4.0}, 1);
  GridField F = dft_full(f);
  CHECK(F.space == Space::Frequency);
  CHECK(std::abs(F.l2() - f.l2()) < 1e-10 * f.l2());
  GridField back = idft_full(F);
  double diff = 0.0;
  for (size_t i = 0; i < f.size(); ++i) diff = std::max(diff, std::abs(back.data[i] - f.data[i]));
  CHECK(diff < 1e-12);
}

TEST_CASE("centered Gaussian transforms to the closed-form pair") {
  // exp(-x^2/(2w^2)) in n dimensions -> w^n exp(-w^2 |xi|^2 / 2) under the
  // unitary continuum convention.
  double w = 1.0, L = 32.0;
  GridField f = gaussian_field(128, L, w);
  GridField F = dft_full(f);
  std::vector<int> idx(2);
  double worst = 0.0;
  for (size_t fl = 0; fl < F.size(); ++fl) {
    F.unflat(fl, idx);
    double xi1 = F.freq(0, idx[0]), xi2 = F.freq(1, idx[1]);
    double expected = w * w * std::exp(-0.5 * w * w * (xi1 * xi1 + xi2 * xi2));
    worst = std::max(worst, std::abs(F.data[fl].real() - expected));
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("partial transform composes to the full transform") {
  GridField f = random_field({16, 16}, {4.0, 4.0}, 2);
  for (int axis : {0, 1}) {
    GridField mixed = partial_dft(f, axis);
    CHECK(mixed.space == Space::Mixed);
    CHECK(mixed.mixed_axis == axis);
    GridField full = dft_mixed_axis(mixed);
    GridField direct = dft_full(f);
    double diff = 0.0;
    for (size_t i = 0; i < full.size(); ++i)
      diff = std::max(diff, std::abs(full.data[i] - direct.data[i]));
    CHECK(diff < 1e-10);
    // Perpendicular Plancherel: the mixed field keeps the L2 norm.
    CHECK(std::abs(mixed.l2() - f.l2()) < 1e-10 * f.l2());
    GridField back = ipartial_dft(mixed);
    diff = 0.0;
    for (size_t i = 0; i < back.size(); ++i)
      diff = std::max(diff, std::abs(back.data[i] - f.data[i]));
    CHECK(diff < 1e-12);
  }
}

TEST_CASE("mixed norms: Fubini and t-independent cases") {
  GridField m = partial_dft(random_field({16, 16}, {4.0, 4.0}, 3), 0);
  // Theta(2,2) is the plain L2 norm.
  CHECK(mixed_norm(m, 2.0, 2.0) == doctest::Approx(m.l2()).epsilon(1e-12));

  // A t-independent field: Theta(inf,2) equals the cross-section L2 norm and
  // Theta(1,2) equals length * cross-section.
  GridField flat = GridField::zeros({8, 8}, {4.0, 4.0}, Space::Mixed, 0);
  std::vector<int> idx(2);
  for (size_t fl = 0; fl < flat.size(); ++fl) {
    flat.unflat(fl, idx);
    flat.data[fl] = idx[1] == 3 ? 2.0 : 0.0;
  }
  // Cross-section: one perpendicular frequency cell of weight dxi, value 2.
  double cross = 2.0 * std::sqrt(flat.cell_weight(1));
  CHECK(mixed_norm(flat, kInf, 2.0) == doctest::Approx(cross).epsilon(1e-12));
  CHECK(mixed_norm(flat, 1.0, 2.0) == doctest::Approx(4.0 * cross).epsilon(1e-12));
}

TEST_CASE("mixed-to-uniform norm inequalities on random fields") {
  // || u ||_{L2(Dr)} <= sqrt(d_r) || F_perp u ||_{Theta(inf,2)} and
  // || F_perp f ||_{Theta(1,2)} <= sqrt(d_s) || f ||_{L2(Ds)} for supported f.
  DomainSpec D = DomainSpec::make_ball({0.0, 0.0}, 1.5);
  double d = diameter(D);
  for (uint64_t seed = 10; seed < 20; ++seed) {
    GridField f = random_field({32, 32}, {8.0, 8.0}, seed);
    std::vector<int> idx(2);
    for (size_t fl = 0; fl < f.size(); ++fl) {
      f.unflat(fl, idx);
      std::vector<double> x = {f.coord(0, idx[0]), f.coord(1, idx[1])};
      if (!D.contains(x)) f.data[fl] = 0.0;
    }
    GridField m = partial_dft(f, 0);
    CHECK(l2_on_domain(f, D) <= std::sqrt(d) * mixed_norm(m, kInf, 2.0) + 1e-8);
    CHECK(mixed_norm(m, 1.0, 2.0) <= std::sqrt(d) * l2_on_domain(f, D) + 1e-8);
  }
}

TEST_CASE("domain norms and diameters") {
  GridField f = GridField::zeros({16, 16}, {4.0, 4.0});
  for (auto& z : f.data) z = 1.0;
  DomainSpec whole = DomainSpec::make_box({-2.0, -2.0}, {2.0, 2.0});
  CHECK(l2_on_domain(f, whole) == doctest::Approx(f.l2()).epsilon(1e-12));
  DomainSpec off = DomainSpec::make_ball({10.0, 0.0}, 0.5);
  CHECK(l2_on_domain(f, off) == 0.0);
  // Half of the 16 grid columns (boundary placed between samples) carries
  // 1/sqrt(2) of the norm.
  DomainSpec half = DomainSpec::make_box({-2.0, -2.0}, {-0.125, 2.0});
  CHECK(l2_on_domain(f, half) == doctest::Approx(f.l2() / std::sqrt(2.0)).epsilon(1e-12));

  CHECK(diameter(DomainSpec::make_ball({0.0, 0.0}, 1.0)) == doctest::Approx(2.0));
  CHECK(diameter(DomainSpec::make_box({0.0, 0.0, 0.0}, {1.0, 1.0, 1.0})) ==
        doctest::Approx(std::sqrt(3.0)));
  // Two unit balls with collinear centers: the line through both centers
  // collects both chords.
  DomainSpec uni = DomainSpec::make_union({{{-3.0, 0.0}, 1.0}, {{3.0, 0.0}, 1.0}});
  CHECK(diameter(uni) == doctest::Approx(4.0).epsilon(1e-9));
}

TEST_CASE("rotation resampling: exact cases and round trip") {
  GridField f = gaussian_field(64, 32.0, 1.5);
  // Identity rotation reproduces the field exactly.
  GridField id = rotate_resample(f, {{1.0, 0.0}, {0.0, 1.0}});
  double diff = 0.0;
  for (size_t i = 0; i < f.size(); ++i) diff = std::max(diff, std::abs(id.data[i] - f.data[i]));
  CHECK(diff < 1e-12);

  // 45 degree rotation of a radial Gaussian: the field is invariant, and the
  // reported round-trip residual stays at interpolation level.
  double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
  double res = 0.0;
  GridField rot = rotate_resample(f, {{c, -s}, {s, c}}, &res);
  CHECK(res < 1e-8);
  diff = 0.0;
  for (size_t i = 0; i < f.size(); ++i)
    diff = std::max(diff, std::abs(rot.data[i] - f.data[i]));
  CHECK(diff < 1e-8);
}

TEST_CASE("rotation guard band is enforced") {
  GridField f = GridField::zeros({32, 32}, {8.0, 8.0});
  std::vector<int> idx(2);
  for (size_t fl = 0; fl < f.size(); ++fl) {
    f.unflat(fl, idx);
    double x = f.coord(0, idx[0]);
    f.data[fl] = std::exp(-std::pow(x - 3.5, 2));  // mass at the box edge
  }
  double c = std::cos(0.3), s = std::sin(0.3);
  CHECK_THROWS_AS(rotate_resample(f, {{c, -s}, {s, c}}), ConfigError);
}

TEST_CASE("field files round trip") {
  GridField f = random_field({8, 4}, {2.0, 1.0}, 77);
  std::string path = "test_fields_roundtrip.scfd";
  write_field(path, f);
  GridField g = read_field(path);
  std::remove(path.c_str());
  CHECK(g.dims == f.dims);
  CHECK(g.box == f.box);
  CHECK(g.space == f.space);
  double diff = 0.0;
  for (size_t i = 0; i < f.size(); ++i) diff = std::max(diff, std::abs(g.data[i] - f.data[i]));
  CHECK(diff == 0.0);
}
