#pragma once

#include <cmath>
#include <cstdint>

namespace qntk {

// Neumaier-compensated summation. Sample counts reach 1e7 and several
// tests assert means to 1e-9..1e-12, which plain accumulation loses.
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Streaming mean/variance over bounded values: compensated first and
// second moments.
struct MeanVarAccumulator {
  NeumaierSum s1;
  NeumaierSum s2;
  std::int64_t count = 0;

  void add(double v) {
    s1.add(v);
    s2.add(v * v);
    ++count;
  }

  double mean() const { return count ? s1.value() / double(count) : 0.0; }

  // unbiased sample variance
  double variance() const {
    if (count < 2) {
      return 0.0;
    }
    const double m = mean();
    const double v = (s2.value() - double(count) * m * m) / double(count - 1);
    return v > 0.0 ? v : 0.0;
  }

  double std_error() const {
    return count ? std::sqrt(variance() / double(count)) : 0.0;
  }
};

}  // namespace qntk
