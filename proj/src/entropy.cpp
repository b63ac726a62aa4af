#include "expent/entropy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>

#include "expent/error.hpp"

namespace expent {

double log_big_g(const Matrix& u) {
  if (!u.all_finite()) throw DomainError("big_g: matrix has non-finite entries");
  double s = 0.0;
  for (double sigma : singular_values(u))
    if (sigma > 1.0) s += std::log(sigma);
  return s;
}

double big_g(const Matrix& u) {
  if (!u.all_finite()) throw DomainError("big_g: matrix has non-finite entries");
  double g = 1.0;
  for (double sigma : singular_values(u))
    if (sigma > 1.0) g *= sigma;
  return g;
}

std::vector<double> EntropyRunConfig::uniform_grid(double t_max, std::size_t points) {
  if (!(t_max > 0.0) || points == 0)
    throw std::invalid_argument("uniform_grid: need t_max > 0 and at least one point");
  std::vector<double> grid(points);
  for (std::size_t k = 0; k < points; ++k)
    grid[k] = t_max * static_cast<double>(k + 1) / static_cast<double>(points);
  grid.back() = t_max;
  return grid;
}

void EntropyRunConfig::validate() const {
  if (region.dim() == 0) throw std::invalid_argument("entropy: region is empty");
  for (std::size_t i = 0; i < region.dim(); ++i)
    if (!std::isfinite(region.lower[i]) || !std::isfinite(region.upper[i]))
      throw std::invalid_argument("entropy: region bounds must be finite for uniform sampling");
  if (points_per_sample == 0) throw std::invalid_argument("entropy: N must be at least 1");
  if (samples == 0) throw std::invalid_argument("entropy: need at least one sample");
  if (t_grid.empty()) throw std::invalid_argument("entropy: empty T grid");
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (!(t_grid[i] > (i == 0 ? 0.0 : t_grid[i - 1])) || !std::isfinite(t_grid[i]))
      throw std::invalid_argument("entropy: T grid must be positive and strictly increasing");
  if (!(fit_window > 0.0 && fit_window <= 1.0))
    throw std::invalid_argument("entropy: fit_window must lie in (0, 1]");
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

PointSampler::PointSampler(std::uint64_t seed, std::uint64_t sample)
    : key_(splitmix64(seed ^ splitmix64(sample * 0xD1B54A32D192ED03ULL + 1))) {}

double PointSampler::uniform(std::uint64_t counter) const {
  const std::uint64_t bits = splitmix64(key_ + counter * kGolden);
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

State PointSampler::point(std::uint64_t index, const Box& box) const {
  const std::size_t n = box.dim();
  State p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = uniform(index * n + i);
    p[i] = box.lower[i] + (box.upper[i] - box.lower[i]) * u;
  }
  return p;
}

// ---------------------------------------------------------------------------
// Estimator

namespace {

constexpr std::size_t kBlockSize = 16;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Running log-sum-exp.
struct LogSum {
  double max = kNegInf;
  double scaled = 0.0;  // sum of exp(x - max)

  void add(double x) {
    if (x <= max) {
      scaled += std::exp(x - max);
    } else {
      scaled = scaled * std::exp(max - x) + 1.0;
      max = x;
    }
  }
  void merge(const LogSum& other) {
    if (other.max == kNegInf) return;
    if (max == kNegInf) {
      *this = other;
      return;
    }
    if (other.max <= max) {
      scaled += other.scaled * std::exp(other.max - max);
    } else {
      scaled = scaled * std::exp(max - other.max) + other.scaled;
      max = other.max;
    }
  }
  double value() const { return max == kNegInf ? kNegInf : max + std::log(scaled); }
};

struct BlockResult {
  std::vector<LogSum> sums;           // per grid time
  std::vector<std::size_t> retained;  // per grid time
  std::size_t failed = 0;
};

BlockResult run_block(const SystemDef& sys, const EntropyRunConfig& cfg,
                      const IntegratorConfig& icfg, std::size_t sample, std::size_t first,
                      std::size_t last) {
  const std::size_t nt = cfg.t_grid.size();
  BlockResult out{std::vector<LogSum>(nt), std::vector<std::size_t>(nt, 0), 0};
  const PointSampler sampler(cfg.seed, sample);
  for (std::size_t k = first; k < last; ++k) {
    const State p = sampler.point(k, cfg.region);
    try {
      flow_until_exit(sys, p, cfg.t_grid, cfg.region, icfg,
                      [&](std::size_t idx, const TangentState& s) {
                        out.sums[idx].add(log_big_g(s.u));
                        ++out.retained[idx];
                      });
    } catch (const NumericalError&) {
      ++out.failed;
    } catch (const DomainError&) {
      ++out.failed;
    }
  }
  return out;
}

std::string format_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

}  // namespace

EntropyEstimate estimate_et(const SystemDef& sys, const EntropyRunConfig& cfg,
                            const IntegratorConfig& icfg) {
  cfg.validate();
  icfg.validate();
  if (cfg.region.dim() != sys.dim())
    throw std::invalid_argument("entropy: region dimension does not match the system");

  const std::size_t nt = cfg.t_grid.size();
  const std::size_t n_points = cfg.points_per_sample;
  const std::size_t blocks_per_sample = (n_points + kBlockSize - 1) / kBlockSize;
  const std::size_t n_items = blocks_per_sample * cfg.samples;

  std::vector<BlockResult> results(n_items);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    for (;;) {
      const std::size_t item = next.fetch_add(1);
      if (item >= n_items) return;
      const std::size_t sample = item / blocks_per_sample;
      const std::size_t block = item % blocks_per_sample;
      const std::size_t first = block * kBlockSize;
      const std::size_t last = std::min(n_points, first + kBlockSize);
      try {
        results[item] = run_block(sys, cfg, icfg, sample, first, last);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(n_items);
        return;
      }
    }
  };

  unsigned threads = cfg.threads == 0 ? std::thread::hardware_concurrency() : cfg.threads;
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n_items)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  // Deterministic reduction: blocks in index order within each sample.
  EntropyEstimate est;
  est.sample_log_e.assign(cfg.samples, std::vector<double>(nt, kNegInf));
  est.sample_retained.assign(cfg.samples, std::vector<std::size_t>(nt, 0));
  const double log_n = std::log(static_cast<double>(n_points));
  for (std::size_t s = 0; s < cfg.samples; ++s) {
    std::vector<LogSum> sums(nt);
    for (std::size_t b = 0; b < blocks_per_sample; ++b) {
      const BlockResult& r = results[s * blocks_per_sample + b];
      est.failed_points += r.failed;
      for (std::size_t i = 0; i < nt; ++i) {
        sums[i].merge(r.sums[i]);
        est.sample_retained[s][i] += r.retained[i];
      }
    }
    for (std::size_t i = 0; i < nt; ++i) {
      const double lse = sums[i].value();
      est.sample_log_e[s][i] = lse == kNegInf ? kNegInf : lse - log_n;
    }
  }

  est.per_t.resize(nt);
  const double n_samples = static_cast<double>(cfg.samples);
  for (std::size_t i = 0; i < nt; ++i) {
    EntropyRow& row = est.per_t[i];
    row.t = cfg.t_grid[i];
    double retained = 0.0;
    std::size_t empty = 0;
    double mean = 0.0;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
      retained += static_cast<double>(est.sample_retained[s][i]);
      if (est.sample_log_e[s][i] == kNegInf)
        ++empty;
      else
        mean += est.sample_log_e[s][i];
    }
    row.mean_retained = retained / n_samples;
    if (empty > 0) {
      row.valid = false;
      row.mean_log_e = std::numeric_limits<double>::quiet_NaN();
      row.var_log_e = std::numeric_limits<double>::quiet_NaN();
      est.warnings.push_back("T = " + format_time(row.t) + ": no point retained in " +
                             std::to_string(empty) + " of " + std::to_string(cfg.samples) +
                             " samples; ln E_T undefined");
      continue;
    }
    mean /= n_samples;
    double ss = 0.0;
    for (std::size_t s = 0; s < cfg.samples; ++s) {
      const double d = est.sample_log_e[s][i] - mean;
      ss += d * d;
    }
    row.mean_log_e = mean;
    row.var_log_e = cfg.samples > 1 ? ss / (n_samples - 1.0) : 0.0;
  }
  if (est.failed_points > 0)
    est.warnings.push_back(std::to_string(est.failed_points) +
                           " point(s) failed to integrate and were treated as exited");
  return est;
}

SlopeFit fit_slope(std::span<const EntropyRow> rows, double fit_window) {
  if (!(fit_window > 0.0 && fit_window <= 1.0))
    throw std::invalid_argument("fit_slope: fit_window must lie in (0, 1]");
  const auto window = static_cast<std::size_t>(
      std::ceil(fit_window * static_cast<double>(rows.size()) - 1e-9));
  const auto tail = rows.last(std::min(window, rows.size()));

  std::vector<std::pair<double, double>> pts;
  for (const EntropyRow& r : tail)
    if (r.valid && std::isfinite(r.mean_log_e)) pts.emplace_back(r.t, r.mean_log_e);
  if (pts.size() < 3)
    throw NumericalError("fit_slope: need at least 3 usable points in the fit window, have " +
                         std::to_string(pts.size()));

  const double n = static_cast<double>(pts.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
  }
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double sse = 0.0;
  for (const auto& [x, y] : pts) {
    const double r = y - (intercept + slope * x);
    sse += r * r;
  }
  return {slope, std::sqrt(sse / (n - 2.0) / sxx), pts.size()};
}

EntropyEstimate expansion_entropy(const SystemDef& sys, const EntropyRunConfig& cfg,
                                  const IntegratorConfig& integrator) {
  EntropyEstimate est = estimate_et(sys, cfg, integrator);
  est.fit = fit_slope(est.per_t, cfg.fit_window);
  return est;
}

}  // namespace expent
