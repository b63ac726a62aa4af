#pragma once

namespace expent {

/// Power-law pair potential phi(r) = c1 r^-delta1 - c2 r^-delta2.
struct PotentialParams {
  double c1 = 1.0;
  double c2 = 2.0;
  double delta1 = 12.0;
  double delta2 = 6.0;

  /// c1 = 1, c2 = 2, delta1 = 12, delta2 = 6: a 12-6 Lennard-Jones
  /// potential with its minimum at r = 1 and depth -1.
  static PotentialParams lennard_jones() { return {}; }

  /// Throws std::invalid_argument unless c1, c2 > 0 and delta1 > delta2 > 2.
  void validate() const;
};

double phi(const PotentialParams& p, double r);
double dphi(const PotentialParams& p, double r);
double d2phi(const PotentialParams& p, double r);

/// The unique critical point of phi on (0, inf), a minimum:
/// (delta1 c1 / (delta2 c2))^(1 / (delta1 - delta2)).
double potential_minimizer(const PotentialParams& p);

}  // namespace expent
