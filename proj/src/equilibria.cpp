#include "expent/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "expent/error.hpp"
#include "expent/linalg.hpp"

namespace expent {

std::string_view to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::equilateral: return "equilateral";
    case ShapeKind::isosceles: return "isosceles";
    case ShapeKind::scalene: return "scalene";
  }
  return "unknown";
}

std::string_view to_string(Stability stability) {
  switch (stability) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::marginal: return "marginal";
  }
  return "unknown";
}

namespace {

std::array<double, 3> sides(const Triangle& t) { return {t.a, t.b, t.c}; }

bool nearly_equal(double x, double y, double rel_tol) {
  return std::abs(x - y) <= rel_tol * std::max(std::abs(x), std::abs(y));
}

}  // namespace

std::array<double, 4> equilibrium_residual(const Triangle& t, double lambda, double area,
                                           const PotentialParams& potential) {
  const auto grad = heron_grad(t);
  const auto s = sides(t);
  return {dphi(potential, s[0]) + lambda * grad[0], dphi(potential, s[1]) + lambda * grad[1],
          dphi(potential, s[2]) + lambda * grad[2], heron_gamma(t) - area * area};
}

ShapeKind classify_kind(const Triangle& t, double rel_tol) {
  const bool ab = nearly_equal(t.a, t.b, rel_tol);
  const bool bc = nearly_equal(t.b, t.c, rel_tol);
  const bool ac = nearly_equal(t.a, t.c, rel_tol);
  if (ab && bc && ac) return ShapeKind::equilateral;
  if (ab || bc || ac) return ShapeKind::isosceles;
  return ShapeKind::scalene;
}

double equilateral_side(double area) {
  if (!(area > 0.0)) throw std::invalid_argument("equilateral_side: area must be positive");
  return 2.0 * std::sqrt(area) / std::pow(3.0, 0.25);
}

double rho(double area, const PotentialParams& potential) {
  const double a = equilateral_side(area);
  return d2phi(potential, a) + 3.0 * dphi(potential, a) / a;
}

EquilibriumPoint equilateral(double area, const PotentialParams& potential) {
  const double a = equilateral_side(area);
  EquilibriumPoint eq;
  eq.triangle = {a, a, a};
  eq.lambda = -4.0 * dphi(potential, a) / (a * a * a);
  eq.area = area;
  eq.kind = ShapeKind::equilateral;
  const double r = rho(area, potential);
  eq.stability = r > 0.0 ? Stability::stable : (r < 0.0 ? Stability::unstable : Stability::marginal);
  return eq;
}

double critical_area(const PotentialParams& potential, double lo, double hi) {
  potential.validate();
  if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("critical_area: invalid bracket");
  double rlo = rho(lo, potential);
  const double rhi = rho(hi, potential);
  if (rlo == 0.0) return lo;
  if (rhi == 0.0) return hi;
  if ((rlo > 0.0) == (rhi > 0.0))
    throw std::invalid_argument("critical_area: rho does not change sign on the bracket");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double rm = rho(mid, potential);
    if (rm == 0.0) return mid;
    if ((rm > 0.0) == (rlo > 0.0)) {
      lo = mid;
      rlo = rm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Stability classify_stability(const EquilibriumPoint& eq, const PotentialParams& potential,
                             double tol) {
  const Triangle& t = eq.triangle;
  const auto s = sides(t);
  const auto hg = heron_hessian(t);
  double h[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[i][j] = eq.lambda * hg[3 * i + j];
  for (int i = 0; i < 3; ++i) h[i][i] += d2phi(potential, s[i]);

  // Orthonormal basis (z1, z2) of the plane normal to grad Gamma.
  const auto g = heron_grad(t);
  const double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
  if (!(gn > 0.0)) return Stability::marginal;
  const std::array<double, 3> n = {g[0] / gn, g[1] / gn, g[2] / gn};
  std::size_t k = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[k])) k = i;
  std::array<double, 3> z1{};
  z1[k] = 1.0;
  const double proj = n[k];
  for (int i = 0; i < 3; ++i) z1[i] -= proj * n[i];
  const double z1n = std::sqrt(z1[0] * z1[0] + z1[1] * z1[1] + z1[2] * z1[2]);
  for (double& v : z1) v /= z1n;
  const std::array<double, 3> z2 = {n[1] * z1[2] - n[2] * z1[1], n[2] * z1[0] - n[0] * z1[2],
                                    n[0] * z1[1] - n[1] * z1[0]};

  auto quad = [&](const std::array<double, 3>& x, const std::array<double, 3>& y) {
    double q = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q += x[i] * h[i][j] * y[j];
    return q;
  };
  const auto [lo, hi] = symmetric_eigenvalues_2x2(quad(z1, z1), quad(z1, z2), quad(z2, z2));
  (void)hi;
  if (lo > tol) return Stability::stable;
  if (lo < -tol) return Stability::unstable;
  return Stability::marginal;
}

EquilibriumPoint solve_equieq(double area, const PotentialParams& potential,
                              const Triangle& guess, std::optional<double> lambda_guess) {
  if (!(area > 0.0)) throw std::invalid_argument("solve_equieq: area must be positive");
  if (!(guess.a > 0.0 && guess.b > 0.0 && guess.c > 0.0))
    throw std::invalid_argument("solve_equieq: guess must have positive sides");

  std::array<double, 3> s = sides(guess);
  double lambda;
  if (lambda_guess) {
    lambda = *lambda_guess;
  } else {
    const auto g = heron_grad(guess);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i) {
      num += dphi(potential, s[i]) * g[i];
      den += g[i] * g[i];
    }
    lambda = den > 0.0 ? -num / den : 0.0;
  }

  auto max_abs = [](const std::array<double, 4>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::abs(v));
    return m;
  };

  constexpr int kMaxIterations = 50;
  constexpr double kResidualTol = 1e-12;
  for (int it = 0; it <= kMaxIterations; ++it) {
    const Triangle t{s[0], s[1], s[2]};
    const auto res = equilibrium_residual(t, lambda, area, potential);
    const double norm = max_abs(res);
    if (norm < kResidualTol) {
      EquilibriumPoint eq;
      eq.triangle = t;
      eq.lambda = lambda;
      eq.area = area;
      eq.kind = classify_kind(t);
      eq.stability = classify_stability(eq, potential);
      return eq;
    }
    if (it == kMaxIterations) break;

    const auto grad = heron_grad(t);
    const auto hess = heron_hessian(t);
    Matrix jac(4, 4);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) jac(i, j) = lambda * hess[3 * i + j];
      jac(i, i) += d2phi(potential, s[i]);
      jac(i, 3) = grad[i];
      jac(3, i) = grad[i];
    }
    const auto delta = solve(jac, {-res[0], -res[1], -res[2], -res[3]});

    // Halve the step until the sides stay positive and the residual does
    // not blow up.
    double step = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 30; ++halvings, step *= 0.5) {
      const std::array<double, 3> trial = {s[0] + step * delta[0], s[1] + step * delta[1],
                                           s[2] + step * delta[2]};
      if (!(trial[0] > 0.0 && trial[1] > 0.0 && trial[2] > 0.0)) continue;
      const double trial_lambda = lambda + step * delta[3];
      const auto trial_res =
          equilibrium_residual({trial[0], trial[1], trial[2]}, trial_lambda, area, potential);
      const double trial_norm = max_abs(trial_res);
      if (!std::isfinite(trial_norm)) continue;
      if (step < 1.0 && trial_norm >= norm) continue;
      s = trial;
      lambda = trial_lambda;
      accepted = true;
      break;
    }
    if (!accepted) break;
  }
  throw NumericalError("solve_equieq: Newton did not converge at A = " + std::to_string(area));
}

State equilibrium_state(const EquilibriumPoint& eq) {
  const ReducedCoords x = sides_to_coords(eq.triangle);
  return {x.u1, x.w1, 0.0, 0.0};
}

// ---------------------------------------------------------------------------
// Branch search

namespace {

int multiplicity(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::equilateral: return 1;
    case ShapeKind::isosceles: return 3;
    case ShapeKind::scalene: return 6;
  }
  return 0;
}

// Representative labeling: equal sides first for isosceles, descending
// otherwise.
Triangle canonical(const Triangle& t, ShapeKind kind) {
  std::array<double, 3> s = sides(t);
  std::sort(s.begin(), s.end(), std::greater<>());
  if (kind == ShapeKind::isosceles && !nearly_equal(s[0], s[1], 1e-6)) {
    // The equal pair is the two smallest.
    return {s[1], s[2], s[0]};
  }
  return {s[0], s[1], s[2]};
}

bool same_shape(const Triangle& x, const Triangle& y) {
  std::array<double, 3> sx = sides(x), sy = sides(y);
  std::sort(sx.begin(), sx.end());
  std::sort(sy.begin(), sy.end());
  for (int i = 0; i < 3; ++i)
    if (!nearly_equal(sx[i], sy[i], 1e-6)) return false;
  return true;
}

// Scales a shape so that its squared area is A^2; empty if degenerate.
std::optional<Triangle> with_area(double p, double q, double r, double area) {
  const double g = heron_gamma({p, q, r});
  if (!(g > 0.0)) return std::nullopt;
  const double scale = std::pow(area * area / g, 0.25);
  return Triangle{p * scale, q * scale, r * scale};
}

std::vector<Triangle> shape_seeds(double area) {
  std::vector<Triangle> seeds;
  // Isosceles (x, x, t x). Newton keeps the mirror symmetry of these seeds.
  for (int i = 1; i < 40; ++i) {
    const double t = 0.05 * i;
    if (auto tri = with_area(1.0, 1.0, t, area)) seeds.push_back(*tri);
  }
  // Scalene (1, beta, gamma) with 1 > beta > gamma > 1 - beta.
  for (int i = 1; i < 20; ++i) {
    const double beta = 0.3 + 0.035 * i;
    for (int j = 1; j < 20; ++j) {
      const double gamma = beta * 0.05 * j;
      if (gamma <= 1.0 - beta + 1e-3) continue;
      if (auto tri = with_area(1.0, beta, gamma, area)) seeds.push_back(*tri);
    }
  }
  return seeds;
}

bool row_less(const BranchRow& x, const BranchRow& y) {
  if (x.area != y.area) return x.area < y.area;
  if (x.point.kind != y.point.kind) return x.point.kind < y.point.kind;
  if (x.point.stability != y.point.stability) return x.point.stability < y.point.stability;
  const Triangle& s = x.point.triangle;
  const Triangle& t = y.point.triangle;
  if (s.a != t.a) return s.a < t.a;
  if (s.b != t.b) return s.b < t.b;
  return s.c < t.c;
}

}  // namespace

std::vector<BranchRow> equilibria_at(double area, const PotentialParams& potential,
                                     std::span<const Triangle> extra_guesses) {
  potential.validate();
  if (!(area > 0.0)) throw std::invalid_argument("equilibria_at: area must be positive");

  std::vector<BranchRow> rows;
  auto add = [&](EquilibriumPoint eq) {
    if (!eq.triangle.valid()) return;
    for (const BranchRow& r : rows)
      if (same_shape(r.point.triangle, eq.triangle)) return;
    eq.triangle = canonical(eq.triangle, eq.kind);
    rows.push_back({area, eq, multiplicity(eq.kind)});
  };

  add(equilateral(area, potential));
  std::vector<Triangle> seeds(extra_guesses.begin(), extra_guesses.end());
  const auto shapes = shape_seeds(area);
  seeds.insert(seeds.end(), shapes.begin(), shapes.end());
  for (const Triangle& guess : seeds) {
    try {
      add(solve_equieq(area, potential, guess));
    } catch (const NumericalError&) {
      // Seed outside every basin, or a singular Jacobian at a bifurcation.
    } catch (const DomainError&) {
    }
  }
  std::sort(rows.begin(), rows.end(), row_less);
  return rows;
}

std::vector<BranchRow> continuation_scan(const PotentialParams& potential, double area_min,
                                         double area_max, double area_step) {
  if (!(area_min > 0.0) || !(area_max >= area_min) || !(area_step > 0.0))
    throw std::invalid_argument("continuation_scan: need 0 < A_min <= A_max and a positive step");
  std::vector<BranchRow> table;
  std::vector<Triangle> previous;
  double previous_area = area_min;
  const auto count =
      static_cast<std::size_t>(std::floor((area_max - area_min) / area_step + 1e-9)) + 1;
  for (std::size_t k = 0; k < count; ++k) {
    const double area = area_min + static_cast<double>(k) * area_step;
    // Carry the previous solutions over at the new area.
    std::vector<Triangle> guesses;
    const double scale = std::sqrt(area / previous_area);
    for (const Triangle& t : previous) guesses.push_back({t.a * scale, t.b * scale, t.c * scale});
    auto rows = equilibria_at(area, potential, guesses);
    previous.clear();
    for (const BranchRow& r : rows) previous.push_back(r.point.triangle);
    previous_area = area;
    table.insert(table.end(), rows.begin(), rows.end());
  }
  return table;
}

}  // namespace expent
