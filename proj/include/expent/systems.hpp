#pragma once

#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "expent/linalg.hpp"
#include "expent/potential.hpp"

namespace expent {

using State = std::vector<double>;

/// An autonomous vector field x' = f(x) on R^n with its Jacobian and,
/// when the flow has one, a conserved energy. Immutable once built; copies
/// share the callables.
class SystemDef {
 public:
  using Rhs = std::function<void(std::span<const double> x, std::span<double> dxdt)>;
  using Jacobian = std::function<void(std::span<const double> x, Matrix& jac)>;
  using Energy = std::function<double(std::span<const double> x)>;
  using Domain = std::function<bool(std::span<const double> x)>;

  SystemDef(std::string name, std::size_t dim, Rhs rhs, Jacobian jacobian,
            Energy energy = {}, Domain domain = {});

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }

  /// Throws DomainError outside the valid domain.
  void rhs(std::span<const double> x, std::span<double> dxdt) const;
  State rhs(std::span<const double> x) const;
  void jacobian(std::span<const double> x, Matrix& jac) const;
  Matrix jacobian(std::span<const double> x) const;

  bool has_energy() const { return static_cast<bool>(energy_); }
  /// Throws std::logic_error when the system has no energy functional.
  double energy(std::span<const double> x) const;

  bool in_domain(std::span<const double> x) const { return !domain_ || domain_(x); }

 private:
  std::string name_;
  std::size_t dim_;
  Rhs rhs_;
  Jacobian jacobian_;
  Energy energy_;
  Domain domain_;
};

/// Central-difference Jacobian with step h * max(1, |x_j|).
Matrix finite_difference_jacobian(const SystemDef::Rhs& rhs, std::span<const double> x,
                                  double h = 1e-6);

// --- three-particle Lennard-Jones system under a fixed area ----------------

struct LJSystemParams {
  PotentialParams potential;
  double mass = 1.0;
  double area = 0.55;

  void validate() const;
};

/// Lower bound on w1 below which the reduced system is treated as singular.
inline constexpr double kMinHeight = 1e-8;

/// Reduced first-order system in (u1, w1, v1, v2) with u2 = 2A / w1
/// eliminated through the area constraint.
SystemDef lj_reduced(const LJSystemParams& params);

/// Kinetic plus potential energy of a reduced state. Throws DomainError
/// if w1 <= 0.
double lj_energy(const LJSystemParams& params, std::span<const double> state);

// --- benchmark systems -----------------------------------------------------

SystemDef linear_system(const Matrix& m);

/// x' = y, y' = -x + y z, z' = 1 - y^2.
SystemDef sprott_a();

struct PendulumParams {
  double m1 = 1.0;
  double m2 = 1.0;
  double l1 = 1.0;
  double l2 = 1.0;
  double g = 9.81;

  void validate() const;
};

/// Planar double pendulum, state (theta1, theta1', theta2, theta2').
/// Rod tensions are solved from their 2x2 linear system at every
/// evaluation; the Jacobian is a central finite difference.
SystemDef double_pendulum(const PendulumParams& params);

/// Rod tensions (T1, T2) at a pendulum state. Throws NumericalError if the
/// tension matrix is singular.
std::pair<double, double> pendulum_tensions(const PendulumParams& params,
                                            std::span<const double> state);

double pendulum_energy(const PendulumParams& params, std::span<const double> state);

// --- registry --------------------------------------------------------------

using ParamMap = std::map<std::string, double, std::less<>>;

/// Builds a catalogue system by name: "linear" (keys n, a11..ann),
/// "sprott_a", "double_pendulum" (m1, m2, l1, l2, g), "lj_reduced"
/// (c1, c2, delta1, delta2, m, A). Missing keys take their defaults;
/// unknown names or keys throw std::invalid_argument.
SystemDef make_system(std::string_view name, const ParamMap& params);

}  // namespace expent
