#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "expent/linalg.hpp"
#include "expent/systems.hpp"

namespace expent {

struct IntegratorConfig {
  double rel_tol = 1e-10;
  double abs_tol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  /// 0 selects the starting step automatically.
  double initial_step = 0.0;
  std::size_t max_steps = 5'000'000;

  void validate() const;
};

/// Flow state r(t; p) with the tangent matrix u = D_p r(t; p).
struct TangentState {
  double t = 0.0;
  State r;
  Matrix u;
};

/// Axis-aligned restraining region. Either bound may be infinite.
/// Membership is closed: points on the boundary are inside.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  Box() = default;
  Box(std::vector<double> lower, std::vector<double> upper);
  static Box symmetric(std::size_t dim, double half_width);

  std::size_t dim() const { return lower.size(); }
  bool contains(std::span<const double> x) const;
};

struct ExitResult {
  /// Time of the first boundary crossing; empty when the orbit stayed in the
  /// box on the whole interval.
  std::optional<double> exit_time;
  /// State at min(exit_time, T). The tangent is empty when not requested.
  TangentState state;

  bool stayed() const { return !exit_time.has_value(); }
  /// True iff the orbit is inside the box throughout [0, t].
  bool retained_through(double t) const { return stayed() || *exit_time > t; }
};

/// Explicit Runge-Kutta 5(4) pair of Dormand and Prince with FSAL stage
/// reuse and the 4th-order continuous extension.
class DormandPrince45 {
 public:
  using Field = std::function<void(std::span<const double> y, std::span<double> dydt)>;

  DormandPrince45(Field field, std::span<const double> y0, double t0,
                  const IntegratorConfig& cfg);

  /// Takes one accepted adaptive step that does not pass t_stop.
  void step(double t_stop);
  /// Takes one unconditional step of size h (no error control).
  void fixed_step(double h);

  double t() const { return t_; }
  double previous_t() const { return t_prev_; }
  std::span<const double> y() const { return y_; }
  std::size_t accepted_steps() const { return accepted_; }
  std::size_t rejected_steps() const { return rejected_; }

  /// Continuous extension on the last accepted step, t in [previous_t, t].
  void dense_output(double t, std::span<double> out) const;

 private:
  void evaluate(std::span<const double> y, std::span<double> dydt);
  /// Computes the stages for step size h into y_new_/err_; returns false
  /// if the field could not be evaluated (domain exit or non-finite values).
  bool attempt(double h);
  double error_norm() const;
  double initial_step_size();
  void accept(double h);

  Field field_;
  IntegratorConfig cfg_;
  std::size_t n_;
  double t_ = 0.0;
  double t_prev_ = 0.0;
  double h_ = 0.0;
  State y_, y_prev_, y_new_, err_, tmp_;
  std::vector<State> k_;       // seven stage derivatives
  std::vector<State> dense_;   // five interpolation coefficient vectors
  std::size_t accepted_ = 0;
  std::size_t rejected_ = 0;
  bool last_failure_domain_ = false;
};

/// r(T; p).
State flow(const SystemDef& sys, std::span<const double> p, double T,
           const IntegratorConfig& cfg = {});

/// r(T; p) and u(T; p), integrated as one coupled system of n + n^2
/// equations under a single error control.
TangentState flow_with_tangent(const SystemDef& sys, std::span<const double> p, double T,
                               const IntegratorConfig& cfg = {});

/// Integrates until T or the first exit from the box, whichever comes first.
/// The exit is located by bisection on the continuous extension to 1e-10 in
/// time; the reported exit time is the first bracketing time at which the
/// orbit is outside.
ExitResult flow_until_exit(const SystemDef& sys, std::span<const double> p, double T,
                           const Box& box, const IntegratorConfig& cfg = {},
                           bool with_tangent = true);

/// As flow_until_exit with the tangent, additionally reporting the tangent
/// state at each grid time (increasing, positive) reached before the exit.
/// Integration ends at grid.back() or at the exit.
ExitResult flow_until_exit(const SystemDef& sys, std::span<const double> p,
                           std::span<const double> grid, const Box& box,
                           const IntegratorConfig& cfg,
                           const std::function<void(std::size_t, const TangentState&)>& on_grid);

struct OrbitSample {
  double t = 0.0;
  State x;
};

/// Orbit at the uniform times k T / intervals, k = 0..intervals.
std::vector<OrbitSample> sample_orbit(const SystemDef& sys, std::span<const double> p,
                                      double T, std::size_t intervals,
                                      const IntegratorConfig& cfg = {});

}  // namespace expent
