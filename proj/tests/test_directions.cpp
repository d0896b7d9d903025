#include <doctest.h>

#include <cmath>

#include "simplechar/directions.hpp"

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

TEST_CASE("tangent set of the Helmholtz symbol is the unit sphere shell") {
  MultiPoly H = helmholtz_poly(3);
  TangentSetSample ts = tangent_set_sample(H, {1.0, 0.0, 0.0}, 3.0, 96);
  CHECK(ts.band_count > 0);
  // Every band point sits near |xi_perp| = 1; the fattened band must stay
  // within a cell of the circle.
  double cell = ts.cell();
  for (int i = 0; i < ts.res * ts.res; ++i) {
    if (!ts.band[i]) continue;
    int a = i / ts.res, b = i % ts.res;
    double x = -ts.extent + (a + 0.5) * cell;
    double y = -ts.extent + (b + 0.5) * cell;
    CHECK(std::abs(std::hypot(x, y) - 1.0) < 0.1 + cell);
  }
  // Distance queries: on-circle point is in the band, far point is far.
  CHECK(ts.dist_to_band({0.0, 1.0, 0.0}) < cell);
  CHECK(ts.dist_to_band({0.0, 2.5, 0.0}) > 1.0);
}

TEST_CASE("direction on the characteristic cone is rejected") {
  // For x1 x2 the principal part vanishes at e1.
  MultiPoly P(2);
  P.add_term({1, 1}, 1.0);
  CHECK_THROWS_AS(tangent_set_sample(P, {1.0, 0.0}, 2.0, 32),
                  DirectionOnCharacteristicCone);
}

TEST_CASE("Helmholtz 2D: two axes plus the diagonal certify") {
  MultiPoly H = helmholtz_poly(2);
  double s = 1.0 / std::sqrt(2.0);
  DirectionSet ds = find_directions(H, {{1.0, 0.0}, {0.0, 1.0}, {s, s}}, 0.05, 0.05,
                                    3.0, 64);
  CHECK(ds.margin > 0.0);
  CHECK(ds.thetas.size() <= 3);
}

TEST_CASE("Laplacian: every tangent set contains the origin, certification fails") {
  MultiPoly L(2);
  L.add_term({2, 0}, 1.0);
  L.add_term({0, 2}, 1.0);
  // All candidates get examined, the grid points near the origin stay
  // uncovered, and the search reports the failure.
  CHECK_THROWS_AS(find_directions(L, sphere_candidates(L, 16, 1), 0.05, 0.05, 2.0, 32),
                  UncertifiedDirections);
}

TEST_CASE("direction search is deterministic given the candidate seed") {
  MultiPoly H = helmholtz_poly(2);
  auto c1 = sphere_candidates(H, 12, 42);
  auto c2 = sphere_candidates(H, 12, 42);
  CHECK(c1 == c2);
  DirectionSet a = find_directions(H, c1, 0.05, 0.05, 2.5, 48);
  DirectionSet b = find_directions(H, c2, 0.05, 0.05, 2.5, 48);
  CHECK(a.thetas == b.thetas);
  CHECK(a.margin == b.margin);
}

TEST_CASE("admissibility condition 1 for the bilaplacian") {
  // lambda = 1: any eps < min(4, 4 sqrt(r0)) passes; the bisection must find
  // a level of that order.
  MultiPoly bil(2);
  bil.add_term({4, 0}, 1.0);
  bil.add_term({2, 2}, 2.0);
  bil.add_term({0, 4}, 1.0);
  bil.add_term({0, 0}, -1.0);
  double r0 = 0.1;
  AdmissibilityReport rep = check_admissibility_cond1(bil, {1.0, 0.0}, r0, 3.0, 256);
  double ceiling = std::min(4.0, 4.0 * std::sqrt(r0));
  CHECK(rep.eps > 0.1 * ceiling);
  CHECK(rep.eps < ceiling * 1.5);
}

TEST_CASE("admissibility condition 2: compact bands for Helmholtz and bilaplacian") {
  MultiPoly H = helmholtz_poly(2);
  CHECK(check_admissibility_cond2(H, {1.0, 0.0}, {0.0, 1.0}, 2.0, 4.0, 128));
  MultiPoly bil(2);
  bil.add_term({4, 0}, 1.0);
  bil.add_term({2, 2}, 2.0);
  bil.add_term({0, 4}, 1.0);
  bil.add_term({0, 0}, -1.0);
  CHECK(check_admissibility_cond2(bil, {1.0, 0.0}, {0.0, 1.0}, 2.0, 4.0, 128));
}

TEST_CASE("second-order plan: axes plus remainder, degenerate rejection") {
  NormalForm2 nfH = normalize_second_order(helmholtz_poly(2));
  SecondOrderPlan plan = second_order_directions(nfH);
  CHECK(plan.axes.size() == 2);
  CHECK(plan.eps > 0.0);
  CHECK(plan.eps <= 0.5 + 1e-12);  // small against |b| = 1

  // Wave-type x1^2 - x2^2 + 1: b = 1, still two directions.
  MultiPoly W(2);
  W.add_term({2, 0}, 1.0);
  W.add_term({0, 2}, -1.0);
  W.add_term({0, 0}, 1.0);
  CHECK(second_order_directions(normalize_second_order(W)).axes.size() == 2);

  // Laplacian: b = 0, beta = 0 is the double characteristic.
  MultiPoly L(2);
  L.add_term({2, 0}, 1.0);
  L.add_term({0, 2}, 1.0);
  CHECK_THROWS_AS(second_order_directions(normalize_second_order(L)),
                  DoubleCharacteristic);
}
