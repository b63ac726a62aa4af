#include "expent/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <string>

#include "expent/error.hpp"

namespace expent {

void IntegratorConfig::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
    throw std::invalid_argument("integrator: tolerances must be positive");
  if (!(max_step > 0.0)) throw std::invalid_argument("integrator: max_step must be positive");
  if (initial_step < 0.0) throw std::invalid_argument("integrator: initial_step must be >= 0");
  if (max_steps == 0) throw std::invalid_argument("integrator: max_steps must be positive");
}

Box::Box(std::vector<double> lo, std::vector<double> hi)
    : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.empty())
    throw std::invalid_argument("Box: bounds must be non-empty and of equal length");
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (std::isnan(lower[i]) || std::isnan(upper[i]) || !(lower[i] < upper[i]))
      throw std::invalid_argument("Box: lower bound must be below upper bound in coordinate " +
                                  std::to_string(i));
  }
}

Box Box::symmetric(std::size_t dim, double half_width) {
  return Box(std::vector<double>(dim, -half_width), std::vector<double>(dim, half_width));
}

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < lower.size(); ++i)
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4)

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
// 5th minus embedded 4th order weights.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Continuous extension.
constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                 d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                 d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

DormandPrince45::DormandPrince45(Field field, std::span<const double> y0, double t0,
                                 const IntegratorConfig& cfg)
    : field_(std::move(field)),
      cfg_(cfg),
      n_(y0.size()),
      t_(t0),
      t_prev_(t0),
      y_(y0.begin(), y0.end()),
      y_prev_(y_),
      y_new_(n_),
      err_(n_),
      tmp_(n_),
      k_(7, State(n_)),
      dense_(5, State(n_)) {
  cfg_.validate();
  evaluate(y_, k_[0]);
  if (!all_finite(k_[0])) throw NumericalError("integrator: non-finite derivative at initial state");
  h_ = cfg_.initial_step > 0.0 ? std::min(cfg_.initial_step, cfg_.max_step) : initial_step_size();
}

void DormandPrince45::evaluate(std::span<const double> y, std::span<double> dydt) {
  field_(y, dydt);
}

double DormandPrince45::initial_step_size() {
  // Hairer, Norsett & Wanner starting-step heuristic.
  auto scaled_norm = [this](std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sc = cfg_.abs_tol + cfg_.rel_tol * std::abs(y_[i]);
      s += (v[i] / sc) * (v[i] / sc);
    }
    return std::sqrt(s / static_cast<double>(n_));
  };
  const double d0 = scaled_norm(y_);
  const double d1n = scaled_norm(k_[0]);
  double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
  h0 = std::min(h0, cfg_.max_step);

  for (int tries = 0; tries < 40; ++tries) {
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y_[i] + h0 * k_[0][i];
    try {
      evaluate(tmp_, k_[1]);
      if (all_finite(k_[1])) break;
    } catch (const DomainError&) {
    }
    h0 *= 0.1;
  }
  for (std::size_t i = 0; i < n_; ++i) err_[i] = k_[1][i] - k_[0][i];
  const double d2 = scaled_norm(err_) / h0;
  const double dmax = std::max(d1n, d2);
  const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
  return std::min({100.0 * h0, h1, cfg_.max_step});
}

bool DormandPrince45::attempt(double h) {
  const State& y = y_;
  auto& k = k_;
  try {
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * a21 * k[0][i];
    evaluate(tmp_, k[1]);
    for (std::size_t i = 0; i < n_; ++i) tmp_[i] = y[i] + h * (a31 * k[0][i] + a32 * k[1][i]);
    evaluate(tmp_, k[2]);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y[i] + h * (a41 * k[0][i] + a42 * k[1][i] + a43 * k[2][i]);
    evaluate(tmp_, k[3]);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y[i] + h * (a51 * k[0][i] + a52 * k[1][i] + a53 * k[2][i] + a54 * k[3][i]);
    evaluate(tmp_, k[4]);
    for (std::size_t i = 0; i < n_; ++i)
      tmp_[i] = y[i] + h * (a61 * k[0][i] + a62 * k[1][i] + a63 * k[2][i] + a64 * k[3][i] +
                            a65 * k[4][i]);
    evaluate(tmp_, k[5]);
    for (std::size_t i = 0; i < n_; ++i)
      y_new_[i] = y[i] + h * (a71 * k[0][i] + a73 * k[2][i] + a74 * k[3][i] + a75 * k[4][i] +
                              a76 * k[5][i]);
    evaluate(y_new_, k[6]);
  } catch (const DomainError&) {
    last_failure_domain_ = true;
    return false;
  }
  for (std::size_t i = 0; i < n_; ++i)
    err_[i] = h * (e1 * k[0][i] + e3 * k[2][i] + e4 * k[3][i] + e5 * k[4][i] + e6 * k[5][i] +
                   e7 * k[6][i]);
  if (!all_finite(y_new_) || !all_finite(k[6]) || !all_finite(err_)) {
    last_failure_domain_ = false;
    return false;
  }
  return true;
}

double DormandPrince45::error_norm() const {
  double s = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double sc =
        cfg_.abs_tol + cfg_.rel_tol * std::max(std::abs(y_[i]), std::abs(y_new_[i]));
    const double r = err_[i] / sc;
    s += r * r;
  }
  return std::sqrt(s / static_cast<double>(n_));
}

void DormandPrince45::accept(double h) {
  const auto& k = k_;
  for (std::size_t i = 0; i < n_; ++i) {
    const double dy = y_new_[i] - y_[i];
    const double bspl = h * k[0][i] - dy;
    dense_[0][i] = y_[i];
    dense_[1][i] = dy;
    dense_[2][i] = bspl;
    dense_[3][i] = dy - h * k[6][i] - bspl;
    dense_[4][i] = h * (d1 * k[0][i] + d3 * k[2][i] + d4 * k[3][i] + d5 * k[4][i] +
                        d6 * k[5][i] + d7 * k[6][i]);
  }
  y_prev_.swap(y_);
  y_.swap(y_new_);
  std::swap(k_[0], k_[6]);
  t_prev_ = t_;
  ++accepted_;
}

void DormandPrince45::step(double t_stop) {
  if (!(t_stop > t_)) throw std::invalid_argument("DormandPrince45::step: t_stop must exceed t");
  bool rejected_once = false;
  for (;;) {
    double h = std::min(h_, cfg_.max_step);
    bool clipped = false;
    if (t_ + h >= t_stop || t_ + 1.01 * h >= t_stop) {
      h = t_stop - t_;
      clipped = true;
    }
    const double h_min = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t_));
    if (h < h_min && !clipped) {
      throw NumericalError(last_failure_domain_
                               ? "integrator: step size underflow at the domain boundary, t = " +
                                     std::to_string(t_)
                               : "integrator: step size underflow, t = " + std::to_string(t_));
    }

    if (!attempt(h)) {
      ++rejected_;
      h_ = 0.2 * h;
      rejected_once = true;
      if (clipped && h < h_min) throw NumericalError("integrator: cannot reach stop time");
      continue;
    }
    const double err = error_norm();
    if (err <= 1.0) {
      double factor = err == 0.0 ? kMaxFactor : kSafety * std::pow(err, -0.2);
      factor = std::clamp(factor, kMinFactor, rejected_once ? 1.0 : kMaxFactor);
      accept(h);
      t_ = clipped ? t_stop : t_prev_ + h;
      // A clipped step says nothing about the natural step size.
      h_ = clipped ? std::max(h_, h * factor) : h * factor;
      last_failure_domain_ = false;
      return;
    }
    ++rejected_;
    rejected_once = true;
    h_ = h * std::max(kMinFactor, kSafety * std::pow(err, -0.2));
  }
}

void DormandPrince45::fixed_step(double h) {
  if (!attempt(h)) throw NumericalError("DormandPrince45::fixed_step: field evaluation failed");
  accept(h);
  t_ = t_prev_ + h;
}

void DormandPrince45::dense_output(double t, std::span<double> out) const {
  const double h = t_ - t_prev_;
  if (h <= 0.0) {
    std::copy(y_.begin(), y_.end(), out.begin());
    return;
  }
  const double theta = (t - t_prev_) / h;
  const double theta1 = 1.0 - theta;
  for (std::size_t i = 0; i < n_; ++i)
    out[i] = dense_[0][i] +
             theta * (dense_[1][i] +
                      theta1 * (dense_[2][i] + theta * (dense_[3][i] + theta1 * dense_[4][i])));
}

// ---------------------------------------------------------------------------
// Drivers

namespace {

void check_initial(const SystemDef& sys, std::span<const double> p, double T) {
  if (p.size() != sys.dim())
    throw std::invalid_argument("initial state has dimension " + std::to_string(p.size()) +
                                ", system '" + sys.name() + "' expects " +
                                std::to_string(sys.dim()));
  if (!(T >= 0.0) || !std::isfinite(T))
    throw std::invalid_argument("integration time must be finite and non-negative");
  if (!sys.in_domain(p)) throw DomainError("initial state outside the valid domain of '" +
                                           sys.name() + "'");
}

DormandPrince45::Field plain_field(const SystemDef& sys) {
  return [&sys](std::span<const double> y, std::span<double> dy) { sys.rhs(y, dy); };
}

// State r followed by the tangent matrix u stored column-major.
DormandPrince45::Field tangent_field(const SystemDef& sys) {
  const std::size_t n = sys.dim();
  auto jac = std::make_shared<Matrix>(n, n);
  return [&sys, n, jac](std::span<const double> y, std::span<double> dy) {
    const auto r = y.first(n);
    sys.rhs(r, dy.first(n));
    sys.jacobian(r, *jac);
    const Matrix& j = *jac;
    for (std::size_t col = 0; col < n; ++col) {
      const double* uc = y.data() + n + col * n;
      double* duc = dy.data() + n + col * n;
      for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k) s += j(i, k) * uc[k];
        duc[i] = s;
      }
    }
  };
}

State augmented_initial(std::span<const double> p) {
  const std::size_t n = p.size();
  State z(n + n * n, 0.0);
  std::copy(p.begin(), p.end(), z.begin());
  for (std::size_t i = 0; i < n; ++i) z[n + i * n + i] = 1.0;
  return z;
}

TangentState unpack(double t, std::span<const double> z, std::size_t n, bool with_tangent) {
  TangentState s;
  s.t = t;
  s.r.assign(z.begin(), z.begin() + static_cast<std::ptrdiff_t>(n));
  if (with_tangent) {
    s.u = Matrix(n, n);
    for (std::size_t col = 0; col < n; ++col)
      for (std::size_t i = 0; i < n; ++i) s.u(i, col) = z[n + col * n + i];
  }
  return s;
}

void count_step(const DormandPrince45& dp, const IntegratorConfig& cfg) {
  if (dp.accepted_steps() + dp.rejected_steps() > cfg.max_steps)
    throw NumericalError("integrator: exceeded max_steps = " + std::to_string(cfg.max_steps) +
                         " at t = " + std::to_string(dp.t()));
}

void check_tangent_finite(const DormandPrince45& dp) {
  for (double v : dp.y())
    if (!std::isfinite(v)) throw NumericalError("integrator: tangent matrix overflow");
}

constexpr int kEventSubdivisions = 8;
constexpr double kEventTimeTolerance = 1e-10;

// Searches the last accepted step for the first box exit. Returns the exit
// time, if any.
std::optional<double> locate_exit(const DormandPrince45& dp, const Box& box, std::size_t n,
                                  State& scratch) {
  const double t0 = dp.previous_t();
  const double t1 = dp.t();
  const double h = t1 - t0;
  double inside_t = t0;
  for (int k = 1; k <= kEventSubdivisions; ++k) {
    const double tk = k == kEventSubdivisions ? t1 : t0 + h * k / kEventSubdivisions;
    if (k == kEventSubdivisions)
      std::copy(dp.y().begin(), dp.y().end(), scratch.begin());
    else
      dp.dense_output(tk, scratch);
    if (box.contains(std::span<const double>(scratch).first(n))) {
      inside_t = tk;
      continue;
    }
    double lo = inside_t, hi = tk;
    while (hi - lo > kEventTimeTolerance) {
      const double mid = 0.5 * (lo + hi);
      dp.dense_output(mid, scratch);
      if (box.contains(std::span<const double>(scratch).first(n)))
        lo = mid;
      else
        hi = mid;
    }
    return hi;
  }
  return std::nullopt;
}

}  // namespace

State flow(const SystemDef& sys, std::span<const double> p, double T,
           const IntegratorConfig& cfg) {
  check_initial(sys, p, T);
  if (T == 0.0) return State(p.begin(), p.end());
  DormandPrince45 dp(plain_field(sys), p, 0.0, cfg);
  while (dp.t() < T) {
    dp.step(T);
    count_step(dp, cfg);
  }
  return State(dp.y().begin(), dp.y().end());
}

TangentState flow_with_tangent(const SystemDef& sys, std::span<const double> p, double T,
                               const IntegratorConfig& cfg) {
  check_initial(sys, p, T);
  const State z0 = augmented_initial(p);
  if (T == 0.0) return unpack(0.0, z0, sys.dim(), true);
  DormandPrince45 dp(tangent_field(sys), z0, 0.0, cfg);
  while (dp.t() < T) {
    dp.step(T);
    count_step(dp, cfg);
    check_tangent_finite(dp);
  }
  return unpack(dp.t(), dp.y(), sys.dim(), true);
}

ExitResult flow_until_exit(const SystemDef& sys, std::span<const double> p, double T,
                           const Box& box, const IntegratorConfig& cfg, bool with_tangent) {
  check_initial(sys, p, T);
  const std::size_t n = sys.dim();
  if (box.dim() != n) throw std::invalid_argument("flow_until_exit: box dimension mismatch");
  if (!box.contains(p)) throw DomainError("flow_until_exit: initial state outside the box");

  const State z0 = with_tangent ? augmented_initial(p) : State(p.begin(), p.end());
  ExitResult result;
  if (T == 0.0) {
    result.state = unpack(0.0, z0, n, with_tangent);
    return result;
  }
  DormandPrince45 dp(with_tangent ? tangent_field(sys) : plain_field(sys), z0, 0.0, cfg);
  State scratch(z0.size());
  while (dp.t() < T) {
    dp.step(T);
    count_step(dp, cfg);
    if (with_tangent) check_tangent_finite(dp);
    if (auto te = locate_exit(dp, box, n, scratch)) {
      dp.dense_output(*te, scratch);
      result.exit_time = *te;
      result.state = unpack(*te, scratch, n, with_tangent);
      return result;
    }
  }
  result.state = unpack(dp.t(), dp.y(), n, with_tangent);
  return result;
}

ExitResult flow_until_exit(const SystemDef& sys, std::span<const double> p,
                           std::span<const double> grid, const Box& box,
                           const IntegratorConfig& cfg,
                           const std::function<void(std::size_t, const TangentState&)>& on_grid) {
  if (grid.empty()) throw std::invalid_argument("flow_until_exit: empty time grid");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (!(grid[i] > (i == 0 ? 0.0 : grid[i - 1])))
      throw std::invalid_argument("flow_until_exit: grid must be positive and increasing");
  const double T = grid.back();
  check_initial(sys, p, T);
  const std::size_t n = sys.dim();
  if (box.dim() != n) throw std::invalid_argument("flow_until_exit: box dimension mismatch");
  if (!box.contains(p)) throw DomainError("flow_until_exit: initial state outside the box");

  DormandPrince45 dp(tangent_field(sys), augmented_initial(p), 0.0, cfg);
  State scratch(n + n * n);
  ExitResult result;
  std::size_t next = 0;
  while (next < grid.size()) {
    dp.step(grid[next]);
    count_step(dp, cfg);
    check_tangent_finite(dp);
    if (auto te = locate_exit(dp, box, n, scratch)) {
      dp.dense_output(*te, scratch);
      result.exit_time = *te;
      result.state = unpack(*te, scratch, n, true);
      return result;
    }
    if (dp.t() == grid[next]) {
      on_grid(next, unpack(dp.t(), dp.y(), n, true));
      ++next;
    }
  }
  result.state = unpack(dp.t(), dp.y(), n, true);
  return result;
}

std::vector<OrbitSample> sample_orbit(const SystemDef& sys, std::span<const double> p,
                                      double T, std::size_t intervals,
                                      const IntegratorConfig& cfg) {
  check_initial(sys, p, T);
  if (intervals == 0) throw std::invalid_argument("sample_orbit: need at least one interval");
  std::vector<OrbitSample> out;
  out.reserve(intervals + 1);
  out.push_back({0.0, State(p.begin(), p.end())});
  if (T == 0.0) return out;
  DormandPrince45 dp(plain_field(sys), p, 0.0, cfg);
  for (std::size_t k = 1; k <= intervals; ++k) {
    const double tk = k == intervals ? T : T * static_cast<double>(k) / static_cast<double>(intervals);
    while (dp.t() < tk) {
      dp.step(tk);
      count_step(dp, cfg);
    }
    out.push_back({tk, State(dp.y().begin(), dp.y().end())});
  }
  return out;
}

}  // namespace expent
