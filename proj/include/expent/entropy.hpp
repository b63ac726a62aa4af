#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "expent/integrator.hpp"
#include "expent/linalg.hpp"
#include "expent/systems.hpp"

namespace expent {

/// Product of the singular values of u that exceed 1, or 1 if none do.
double big_g(const Matrix& u);
/// ln big_g(u), computed as a sum of logs so it cannot overflow.
double log_big_g(const Matrix& u);

struct EntropyRunConfig {
  Box region;
  std::size_t points_per_sample = 1000;
  std::size_t samples = 10;
  /// Strictly increasing report times; the last one is T_max.
  std::vector<double> t_grid;
  std::uint64_t seed = 1;
  /// Trailing fraction of t_grid used by the slope fit.
  double fit_window = 0.5;
  /// Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 1;

  /// t_max * k / points for k = 1..points.
  static std::vector<double> uniform_grid(double t_max, std::size_t points);

  void validate() const;
};

struct EntropyRow {
  double t = 0.0;
  /// Mean over samples of ln E_T; NaN when some sample retained no point.
  double mean_log_e = 0.0;
  /// Unbiased sample variance of ln E_T across samples (0 for one sample).
  double var_log_e = 0.0;
  /// Mean number of points that stayed in the region through t.
  double mean_retained = 0.0;
  bool valid = true;
};

struct SlopeFit {
  double slope = 0.0;
  double standard_error = 0.0;
  std::size_t points = 0;
};

struct EntropyEstimate {
  std::vector<EntropyRow> per_t;
  /// ln E_T per [sample][t]; -inf where no point was retained.
  std::vector<std::vector<double>> sample_log_e;
  /// Retained point counts per [sample][t].
  std::vector<std::vector<std::size_t>> sample_retained;
  std::optional<SlopeFit> fit;
  /// Points whose integration failed; they count as having left the region
  /// at the failure time.
  std::size_t failed_points = 0;
  std::vector<std::string> warnings;
};

/// Uniform draws over a box from a counter-based SplitMix64 stream keyed by
/// (seed, sample). Point k of a sample is the same whatever order or thread
/// it is generated on.
class PointSampler {
 public:
  PointSampler(std::uint64_t seed, std::uint64_t sample);

  State point(std::uint64_t index, const Box& box) const;
  /// The raw uniform variate in (0, 1) at a stream position.
  double uniform(std::uint64_t counter) const;

 private:
  std::uint64_t key_;
};

/// Monte Carlo estimate of E_T on every grid time, over all samples.
/// Points contribute G(u(T; p)) while they have stayed inside the region
/// and 0 afterwards; each sample sum is divided by N.
EntropyEstimate estimate_et(const SystemDef& sys, const EntropyRunConfig& cfg,
                            const IntegratorConfig& integrator = {});

/// Least-squares slope of mean ln E_T against T over the trailing
/// fit_window fraction of the rows, skipping invalid rows. Throws
/// NumericalError with fewer than three usable rows.
SlopeFit fit_slope(std::span<const EntropyRow> rows, double fit_window);

/// estimate_et followed by fit_slope. The fitted slope estimates the
/// expansion entropy H0.
EntropyEstimate expansion_entropy(const SystemDef& sys, const EntropyRunConfig& cfg,
                                  const IntegratorConfig& integrator = {});

}  // namespace expent
