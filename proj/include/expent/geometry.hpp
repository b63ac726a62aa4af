#pragma once

#include <array>

namespace expent {

/// Side lengths of the particle triangle: a = |r1 - r2|, b = |r1 - r3|,
/// c = |r2 - r3|.
struct Triangle {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;

  /// Strict triangle inequality with positive sides.
  bool valid() const;
};

/// Planar placement with particle 3 at the origin, particle 2 at (u2, 0)
/// and particle 1 at (u1, w1); w1 > 0 and u2 > 0 in the canonical embedding.
struct ReducedCoords {
  double u1 = 0.0;
  double w1 = 0.0;
  double u2 = 0.0;
};

/// Heron's squared area. Non-positive exactly when the triangle inequality
/// fails (zero for collinear configurations).
double heron_gamma(const Triangle& t);

/// (dGamma/da, dGamma/db, dGamma/dc).
std::array<double, 3> heron_grad(const Triangle& t);

/// Second derivatives of Gamma, row-major 3x3.
std::array<double, 9> heron_hessian(const Triangle& t);

/// Reduced area constraint (1/4) w1^2 u2^2 - A^2.
double gamma_constraint(double u1, double w1, double u2, double area);

/// Law-of-cosines placement. Throws DomainError if the sides do not form a
/// triangle.
ReducedCoords sides_to_coords(const Triangle& t);

Triangle coords_to_sides(const ReducedCoords& x);

}  // namespace expent
