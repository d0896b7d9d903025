#include <doctest.h>

#include <cmath>
#include <random>

#include "simplechar/multipliers.hpp"

using namespace simplechar;

namespace {

MultiPoly helmholtz_poly(int n) {
  MultiPoly P(n);
  for (int a = 0; a < n; ++a) {
    std::vector<int> e(n, 0);
    e[a] = 2;
    P.add_term(e, 1.0);
  }
  P.add_term(std::vector<int>(n, 0), -1.0);
  return P;
}

}  // namespace

TEST_CASE("bump profile: plateaus and monotone transition") {
  double eps = 0.25;
  CHECK(bump(0.5 * eps, eps) == 0.0);
  CHECK(bump(3.0 * eps, eps) == 1.0);
  double mid = bump(1.5 * eps, eps);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  double prev = 0.0;
  for (double t = 1.0; t <= 2.0; t += 0.05) {
    double v = bump_profile(t);
    CHECK(v >= prev);
    prev = v;
  }
  CHECK_THROWS_AS(bump(1.0, 0.0), ConfigError);
}

TEST_CASE("second-order cutoffs: support pattern and partition identity") {
  NormalForm2 nf = normalize_second_order(helmholtz_poly(2));
  GridField like = GridField::zeros({64, 64}, {32.0, 32.0}, Space::Frequency);
  double eps = 0.1;
  CutoffFamily fam = second_order_cutoffs(nf, eps, like);
  REQUIRE(fam.raw.size() == 2);
  REQUIRE(fam.telescoped.size() == 2);
  REQUIRE(fam.prefix.size() == 2);

  std::vector<int> idx(2);
  double partition_err = 0.0, prefix_err = 0.0;
  for (size_t f = 0; f < like.size(); ++f) {
    like.unflat(f, idx);
    std::vector<double> xi = {like.freq(0, idx[0]), like.freq(1, idx[1])};
    cplx sum = fam.remainder.values.data[f];
    for (int k = 0; k < 2; ++k) {
      cplx v = fam.raw[k].values.data[f];
      // Values stay in [0,1].
      CHECK(v.real() >= 0.0);
      CHECK(v.real() <= 1.0 + 1e-15);
      CHECK(std::abs(v.imag()) < 1e-15);
      // Phi_k vanishes where |Q_k| <= eps and is 1 where |Q_k| >= 2 eps.
      double Qk = std::abs(nf.Qk(k, nf.to_normal(xi)));
      if (Qk <= eps) CHECK(v.real() == 0.0);
      if (Qk >= 2.0 * eps) CHECK(v.real() == 1.0);
      sum += fam.telescoped[k].values.data[f];
      // Psi_k = phi_k * prefix_k by construction.
      prefix_err = std::max(prefix_err,
                            std::abs(fam.telescoped[k].values.data[f] -
                                     v * fam.prefix[k].values.data[f]));
    }
    partition_err = std::max(partition_err, std::abs(sum - 1.0));
  }
  CHECK(partition_err < 1e-12);
  CHECK(prefix_err < 1e-15);
}

TEST_CASE("raw axis cutoffs do not depend on the solve-axis frequency") {
  // Q_k omits the k-th coordinate, so phi_k must be constant along axis k;
  // the routes rely on this to keep line data compactly supported.
  NormalForm2 nf = normalize_second_order(helmholtz_poly(2));
  GridField like = GridField::zeros({32, 32}, {16.0, 16.0}, Space::Frequency);
  CutoffFamily fam = second_order_cutoffs(nf, 0.1, like);
  std::vector<int> idx(2);
  for (int k = 0; k < 2; ++k) {
    const GridField& v = fam.raw[k].values;
    for (size_t f = 0; f < v.size(); ++f) {
      v.unflat(f, idx);
      std::vector<int> base = idx;
      base[k] = 0;
      CHECK(v.data[f] == v.data[v.flat(base)]);
    }
  }
}

TEST_CASE("multiplier application: identity, zero, and the partition sum") {
  GridField like = GridField::zeros({16, 16}, {8.0, 8.0}, Space::Frequency);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  GridField fhat = like;
  for (auto& z : fhat.data) z = cplx(unif(rng), unif(rng));

  MultiplierField one = multiplier_from_function(like, [](const std::vector<double>&) {
    return 1.0;
  }, "one");
  MultiplierField zero = multiplier_from_function(like, [](const std::vector<double>&) {
    return 0.0;
  }, "zero");
  GridField a = apply_multiplier(fhat, one);
  for (size_t i = 0; i < a.size(); ++i) CHECK(a.data[i] == fhat.data[i]);
  CHECK(apply_multiplier(fhat, zero).l2() == 0.0);

  NormalForm2 nf = normalize_second_order(helmholtz_poly(2));
  CutoffFamily fam = second_order_cutoffs(nf, 0.1, like);
  GridField sum = apply_multiplier(fhat, fam.remainder);
  for (const auto& t : fam.telescoped) sum += apply_multiplier(fhat, t);
  double diff = 0.0;
  for (size_t i = 0; i < sum.size(); ++i)
    diff = std::max(diff, std::abs(sum.data[i] - fhat.data[i]));
  CHECK(diff < 1e-12);

  GridField wrong = GridField::zeros({8, 8}, {8.0, 8.0}, Space::Frequency);
  CHECK_THROWS_AS(apply_multiplier(wrong, one), GridMismatch);
}

TEST_CASE("Gaussian multiplier has directional norm exactly one") {
  GridField like = GridField::zeros({256, 16}, {64.0, 16.0}, Space::Frequency);
  MultiplierField g = multiplier_from_function(
      like, [](const std::vector<double>& xi) { return std::exp(-0.5 * xi[0] * xi[0]); },
      "gaussian");
  CHECK(multiplier_theta_norm(g, 0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("directional norm bounds multiplier action on the mixed norm") {
  GridField like = GridField::zeros({32, 32}, {16.0, 16.0}, Space::Frequency);
  NormalForm2 nf = normalize_second_order(helmholtz_poly(2));
  CutoffFamily fam = second_order_cutoffs(nf, 0.2, like);
  double norm0 = multiplier_theta_norm(fam.telescoped[1], 0);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    GridField f = GridField::zeros({32, 32}, {16.0, 16.0});
    std::vector<int> idx(2);
    for (size_t fl = 0; fl < f.size(); ++fl) {
      f.unflat(fl, idx);
      // Compact support in the inner quarter of the box.
      if (std::abs(f.coord(0, idx[0])) < 4.0 && std::abs(f.coord(1, idx[1])) < 4.0)
        f.data[fl] = cplx(unif(rng), unif(rng));
    }
    GridField mf = partial_dft(f, 0);
    GridField mMf = partial_dft(idft_full(apply_multiplier(dft_full(f),
                                                           fam.telescoped[1])), 0);
    CHECK(mixed_norm(mMf, 1.0, 2.0) <= norm0 * mixed_norm(mf, 1.0, 2.0) + 1e-8);
  }
}

TEST_CASE("sublevel-measure bound dominates the transition profile") {
  // q(t) = t^2 - 1 sampled on a line; the estimate 2 mu1 (M1/eps + sqrt(M2/eps))
  // must dominate the L1 norm of the inverse transform of bump(q(t), eps).
  int M = 4096;
  double L = 64.0, h = L / M, eps = 0.1;
  std::vector<double> q(M);
  for (int i = 0; i < M; ++i) {
    double t = -L / 2 + i * h;
    q[i] = t * t - 1.0;
  }
  MultiplierBoundEstimate e = bump_multiplier_bound(q, h, eps);
  CHECK(e.mu1 > 0.0);
  CHECK(e.bound > 0.0);

  // Numerically integrate || (bump(q,eps))^vee ||_{L1} via the grid transform.
  GridField like = GridField::zeros({M}, {L}, Space::Frequency);
  MultiplierField m = multiplier_from_function(
      like, [&](const std::vector<double>& xi) { return bump(xi[0] * xi[0] - 1.0, eps); },
      "q_cutoff");
  double l1 = multiplier_theta_norm(m, 0) * std::sqrt(2.0 * M_PI);
  CHECK(l1 <= e.bound * 1.02);
}

TEST_CASE("two-direction transform: right angle and norm equality") {
  GridField like = GridField::zeros({64, 64}, {32.0, 32.0});
  auto psi = [](double r) { return cplx(std::exp(-0.5 * r * r)); };

  // Right angle: no phase, unit stretch.
  PlaneGeometry g90 = make_plane_geometry({1.0, 0.0}, {0.0, 1.0});
  CHECK(g90.alpha == doctest::Approx(M_PI / 2.0));
  GridField w90 = two_direction_transform(psi, g90, like);
  std::vector<int> idx(2);
  double imag_max = 0.0;
  for (size_t f = 0; f < w90.size(); ++f) imag_max = std::max(imag_max, std::abs(w90.data[f].imag()));
  CHECK(imag_max < 1e-10);

  // Oblique pair: the Theta(1,inf) norm equals the norm of psi itself
  // (Gaussian: L1/sqrt(2 pi) = 1), independent of the angle.
  double c = std::cos(M_PI / 4.0), s = std::sin(M_PI / 4.0);
  PlaneGeometry g45 = make_plane_geometry({1.0, 0.0}, {c, s});
  GridField w45 = two_direction_transform(psi, g45, like);
  double ht = w45.h(0);
  std::vector<double> line_l1(64, 0.0);
  for (size_t f = 0; f < w45.size(); ++f) {
    w45.unflat(f, idx);
    line_l1[idx[1]] += std::abs(w45.data[f]) * ht;
  }
  double sup = 0.0;
  for (double v : line_l1) sup = std::max(sup, v);
  CHECK(sup / std::sqrt(2.0 * M_PI) == doctest::Approx(1.0).epsilon(1e-4));

  CHECK_THROWS_AS(make_plane_geometry({1.0, 0.0}, {1.0, 1e-9}), NearParallel);
}
