#include "expent/geometry.hpp"

#include <cmath>

#include "expent/error.hpp"

namespace expent {

bool Triangle::valid() const {
  return a > 0.0 && b > 0.0 && c > 0.0 && a < b + c && b < a + c && c < a + b;
}

double heron_gamma(const Triangle& t) {
  const double a2 = t.a * t.a, b2 = t.b * t.b, c2 = t.c * t.c;
  return (a2 * b2 + a2 * c2 + b2 * c2) / 8.0 - (a2 * a2 + b2 * b2 + c2 * c2) / 16.0;
}

std::array<double, 3> heron_grad(const Triangle& t) {
  const double a2 = t.a * t.a, b2 = t.b * t.b, c2 = t.c * t.c;
  return {0.25 * t.a * (b2 + c2 - a2), 0.25 * t.b * (a2 + c2 - b2),
          0.25 * t.c * (a2 + b2 - c2)};
}

std::array<double, 9> heron_hessian(const Triangle& t) {
  const double a2 = t.a * t.a, b2 = t.b * t.b, c2 = t.c * t.c;
  const double ab = 0.5 * t.a * t.b, ac = 0.5 * t.a * t.c, bc = 0.5 * t.b * t.c;
  return {0.25 * (b2 + c2) - 0.75 * a2, ab, ac,
          ab, 0.25 * (a2 + c2) - 0.75 * b2, bc,
          ac, bc, 0.25 * (a2 + b2) - 0.75 * c2};
}

double gamma_constraint(double /*u1*/, double w1, double u2, double area) {
  return 0.25 * w1 * w1 * u2 * u2 - area * area;
}

ReducedCoords sides_to_coords(const Triangle& t) {
  if (!(t.c > 0.0)) throw DomainError("sides_to_coords: side c must be positive");
  const double u1 = (t.b * t.b + t.c * t.c - t.a * t.a) / (2.0 * t.c);
  const double h2 = t.b * t.b - u1 * u1;
  if (!(h2 > 0.0)) throw DomainError("sides_to_coords: sides violate the triangle inequality");
  return {u1, std::sqrt(h2), t.c};
}

Triangle coords_to_sides(const ReducedCoords& x) {
  return {std::hypot(x.u1 - x.u2, x.w1), std::hypot(x.u1, x.w1), x.u2};
}

}  // namespace expent
