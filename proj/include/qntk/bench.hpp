#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qntk::bench {

struct BenchPoint {
  std::string sweep;   // "n", "L", "m", or "N"
  double value;        // swept parameter
  double seconds;      // wall time per evaluation (or per estimate for N)
  std::int64_t iters;  // repetitions behind the timing
};

struct BenchReport {
  std::vector<BenchPoint> points;
  double exponent_n = 0.0;
  double exponent_l = 0.0;
  double exponent_m = 0.0;
  double exponent_samples = 0.0;
};

/// Scaling sweeps for the model-function evaluation cost (n, L, m) and for
/// the sampled kernel estimate (N). Each point is timed adaptively and the
/// exponents come from least-squares log-log fits.
BenchReport run_bench(std::uint64_t seed = 1);

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

std::string to_csv(const BenchReport& report);

}  // namespace qntk::bench
