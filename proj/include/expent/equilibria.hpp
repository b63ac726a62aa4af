#pragma once

#include <array>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "expent/geometry.hpp"
#include "expent/potential.hpp"
#include "expent/systems.hpp"

namespace expent {

enum class ShapeKind { equilateral, isosceles, scalene };
enum class Stability { stable, unstable, marginal };

std::string_view to_string(ShapeKind kind);
std::string_view to_string(Stability stability);

/// A rest configuration of the area-constrained three-particle system:
/// phi'(s) + lambda dGamma/ds = 0 for each side s and Gamma = A^2.
struct EquilibriumPoint {
  Triangle triangle;
  double lambda = 0.0;
  double area = 0.0;
  ShapeKind kind = ShapeKind::scalene;
  Stability stability = Stability::marginal;

  bool stable() const { return stability == Stability::stable; }
};

/// Residuals of the four equilibrium equations.
std::array<double, 4> equilibrium_residual(const Triangle& t, double lambda, double area,
                                           const PotentialParams& potential);

/// Side-equality classification with relative tolerance.
ShapeKind classify_kind(const Triangle& t, double rel_tol = 1e-6);

/// Side length of the equilateral configuration with area A: 2 sqrt(A) / 3^(1/4).
double equilateral_side(double area);

/// Closed-form equilateral equilibrium, stability from rho(A).
EquilibriumPoint equilateral(double area, const PotentialParams& potential);

/// rho(A) = phi''(a_A) + 3 phi'(a_A) / a_A; the equilateral branch is stable
/// where rho > 0.
double rho(double area, const PotentialParams& potential);

/// Root of rho in [lo, hi] by bisection. Throws std::invalid_argument when rho
/// does not change sign on the bracket.
double critical_area(const PotentialParams& potential, double lo = 1e-3, double hi = 1e3);

/// Newton iteration on (a, b, c, lambda). Without a multiplier guess the
/// least-squares multiplier of the first three equations is used. Throws
/// NumericalError after 50 iterations without convergence and
/// SingularSystemError on a singular Jacobian.
EquilibriumPoint solve_equieq(double area, const PotentialParams& potential,
                              const Triangle& guess,
                              std::optional<double> lambda_guess = std::nullopt);

/// Second-order test for a constrained minimum of U(a,b,c) on Gamma = A^2:
/// the Hessian of U + lambda (Gamma - A^2) restricted to the tangent plane
/// of the constraint. Eigenvalues within tol of zero give `marginal`.
Stability classify_stability(const EquilibriumPoint& eq, const PotentialParams& potential,
                             double tol = 1e-10);

/// Reduced-system rest state (u1, w1, 0, 0) for an equilibrium.
State equilibrium_state(const EquilibriumPoint& eq);

/// Distinct shapes found at one area; multiplicity counts labeled
/// permutations of the sides (1, 3 or 6).
struct BranchRow {
  double area = 0.0;
  EquilibriumPoint point;
  int multiplicity = 1;
};

/// Equilibria at a single area, seeded from the equilateral point, a family
/// of isosceles and scalene shapes with that area, and any extra guesses.
std::vector<BranchRow> equilibria_at(double area, const PotentialParams& potential,
                                     std::span<const Triangle> extra_guesses = {});

/// equilibria_at over an area grid, each step also seeded from the previous
/// step's solutions. Rows are ordered by area, then kind, then sides.
std::vector<BranchRow> continuation_scan(const PotentialParams& potential, double area_min,
                                         double area_max, double area_step);

}  // namespace expent
