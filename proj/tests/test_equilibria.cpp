#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <tuple>

#include "doctest.h"
#include "expent/equilibria.hpp"
#include "expent/error.hpp"
#include "expent/geometry.hpp"

using namespace expent;

namespace {

const PotentialParams lj = PotentialParams::lennard_jones();

using Signature = std::multiset<std::tuple<ShapeKind, Stability, int>>;

Signature signature(const std::vector<BranchRow>& rows, double area) {
  Signature s;
  for (const auto& r : rows)
    if (std::abs(r.area - area) < 1e-9) s.insert({r.point.kind, r.point.stability, r.multiplicity});
  return s;
}

}  // namespace

TEST_CASE("equilateral side and multiplier") {
  const double a = equilateral_side(0.55);
  CHECK(a == doctest::Approx(1.1270).epsilon(1e-4));
  CHECK(heron_gamma({a, a, a}) == doctest::Approx(0.55 * 0.55));
  const auto eq = equilateral(0.55, lj);
  CHECK(eq.kind == ShapeKind::equilateral);
  CHECK(eq.lambda == doctest::Approx(-4 * dphi(lj, a) / (a * a * a)));
  for (double r : equilibrium_residual(eq.triangle, eq.lambda, 0.55, lj)) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("equilateral stability follows the sign of rho") {
  CHECK(equilateral(0.55, lj).stable());
  CHECK(classify_stability(equilateral(0.55, lj), lj) == Stability::stable);
  CHECK(equilateral(0.65, lj).stability == Stability::unstable);
  CHECK(classify_stability(equilateral(0.65, lj), lj) == Stability::unstable);
  CHECK(rho(0.55, lj) > 0);
  CHECK(rho(0.65, lj) < 0);
}

TEST_CASE("critical area is the analytic root") {
  const double a0 = critical_area(lj);
  CHECK(a0 == doctest::Approx(std::sqrt(3.0) / 4 * std::cbrt(2.5)).epsilon(1e-12));
  CHECK(std::abs(rho(a0, lj)) < 1e-8);
  CHECK_THROWS_AS(critical_area(lj, 0.7, 1.0), std::invalid_argument);
}

TEST_CASE("scalene equilibrium at A = 0.65") {
  const auto eq = solve_equieq(0.65, lj, {1.42, 1.28, 1.06});
  CHECK(eq.kind == ShapeKind::scalene);
  CHECK(eq.stable());
  std::array<double, 3> s{eq.triangle.a, eq.triangle.b, eq.triangle.c};
  std::sort(s.begin(), s.end());
  CHECK(s[0] == doctest::Approx(1.0580).epsilon(2e-3));
  CHECK(s[1] == doctest::Approx(1.2776).epsilon(2e-3));
  CHECK(s[2] == doctest::Approx(1.4182).epsilon(2e-3));
  CHECK(heron_gamma(eq.triangle) == doctest::Approx(0.4225).epsilon(1e-10));
  for (double r : equilibrium_residual(eq.triangle, eq.lambda, 0.65, lj)) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("permuted guesses give permuted solutions") {
  const auto base = solve_equieq(0.65, lj, {1.42, 1.28, 1.06});
  const auto perm = solve_equieq(0.65, lj, {1.06, 1.42, 1.28});
  CHECK(perm.triangle.a == doctest::Approx(base.triangle.c).epsilon(1e-10));
  CHECK(perm.triangle.b == doctest::Approx(base.triangle.a).epsilon(1e-10));
  CHECK(perm.triangle.c == doctest::Approx(base.triangle.b).epsilon(1e-10));
  CHECK(perm.lambda == doctest::Approx(base.lambda).epsilon(1e-10));
}

TEST_CASE("kind classification") {
  CHECK(classify_kind({1, 1, 1}) == ShapeKind::equilateral);
  CHECK(classify_kind({1, 1 + 1e-8, 1}) == ShapeKind::equilateral);
  CHECK(classify_kind({1, 1.2, 1}) == ShapeKind::isosceles);
  CHECK(classify_kind({1, 1.2, 1.4}) == ShapeKind::scalene);
}

TEST_CASE("structure at the spot-check areas") {
  using K = ShapeKind;
  using S = Stability;
  const Signature lone{{K::equilateral, S::stable, 1}};
  const Signature pairs{{K::equilateral, S::unstable, 1},
                        {K::isosceles, S::stable, 3},
                        {K::isosceles, S::unstable, 3}};
  const Signature scalene{{K::equilateral, S::unstable, 1},
                          {K::isosceles, S::unstable, 3},
                          {K::isosceles, S::unstable, 3},
                          {K::scalene, S::stable, 6}};
  CHECK(signature(equilibria_at(0.50, lj), 0.50) == lone);
  CHECK(signature(equilibria_at(0.60, lj), 0.60) == pairs);
  CHECK(signature(equilibria_at(0.65, lj), 0.65) == scalene);
  CHECK(signature(equilibria_at(0.70, lj), 0.70) == pairs);

  const auto scan = continuation_scan(lj, 0.45, 0.75, 0.01);
  CHECK(signature(scan, 0.50) == lone);
  CHECK(signature(scan, 0.60) == pairs);
  CHECK(signature(scan, 0.65) == scalene);
  CHECK(signature(scan, 0.70) == pairs);
}

TEST_CASE("every reported point solves the equations and has area A") {
  for (const auto& row : continuation_scan(lj, 0.5, 0.7, 0.05)) {
    const auto& p = row.point;
    CHECK(heron_gamma(p.triangle) == doctest::Approx(row.area * row.area).epsilon(1e-10));
    for (double r : equilibrium_residual(p.triangle, p.lambda, row.area, lj))
      CHECK(std::abs(r) < 1e-10);
    CHECK(row.multiplicity == (p.kind == ShapeKind::equilateral ? 1
                               : p.kind == ShapeKind::isosceles ? 3
                                                                : 6));
  }
}

TEST_CASE("equilateral branch exists for another admissible potential") {
  const PotentialParams p{1.0, 2.0, 6.5, 6.0};
  for (const auto& area : {0.3, 0.6, 1.2}) {
    const auto rows = equilibria_at(area, p);
    const bool has_equilateral = std::any_of(rows.begin(), rows.end(), [](const BranchRow& r) {
      return r.point.kind == ShapeKind::equilateral;
    });
    CHECK(has_equilateral);
  }
  CHECK_NOTHROW(continuation_scan(p, 0.45, 0.75, 0.01));
}

TEST_CASE("equilibrium rest state") {
  const auto s = equilibrium_state(equilateral(0.55, lj));
  CHECK(s[0] == doctest::Approx(0.5635).epsilon(1e-3));
  CHECK(s[1] == doctest::Approx(0.9760).epsilon(1e-3));
  CHECK(s[2] == 0.0);
  CHECK(s[3] == 0.0);
}

TEST_CASE("bad inputs") {
  CHECK_THROWS_AS(equilateral_side(0.0), std::invalid_argument);
  CHECK_THROWS_AS(continuation_scan(lj, 0.7, 0.5, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(continuation_scan(lj, 0.5, 0.7, 0.0), std::invalid_argument);
}
