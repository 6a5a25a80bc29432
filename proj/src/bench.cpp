#include "qntk/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "qntk/estimator.hpp"
#include "qntk/oracle.hpp"

namespace qntk::bench {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Median-of-three adaptive timing: repeat fn until the batch takes at least
// min_time, then report seconds per call.
template <class Fn>
double time_per_call(Fn&& fn, double min_time = 0.05) {
  std::vector<double> runs;
  for (int rep = 0; rep < 3; ++rep) {
    std::int64_t iters = 1;
    for (;;) {
      const auto start = Clock::now();
      for (std::int64_t i = 0; i < iters; ++i) {
        fn();
      }
      const double elapsed = seconds_since(start);
      if (elapsed >= min_time) {
        runs.push_back(elapsed / double(iters));
        break;
      }
      iters = elapsed <= 1e-9 ? iters * 16
                              : std::int64_t(double(iters) * (min_time / elapsed) * 1.3) + 1;
    }
  }
  std::sort(runs.begin(), runs.end());
  return runs[1];
}

struct EvalFixture {
  CircuitTemplate tmpl;
  std::shared_ptr<const InstantiatedCircuit> inst;
  ParameterVector theta;
  double sink = 0.0;
};

EvalFixture make_fixture(std::uint64_t seed, std::size_t n, std::size_t L, std::size_t m) {
  oracle::RandomTemplateSpec spec;
  spec.n = n;
  spec.num_parameters = L;
  spec.num_terms = m;
  spec.gates_per_layer = n;
  spec.input_bits = 0;
  spec.allow_guards = false;
  EvalFixture fx;
  fx.tmpl = oracle::random_template(seed, spec);
  fx.inst = std::make_shared<const InstantiatedCircuit>(
      instantiate(fx.tmpl, InputPoint("")));
  fx.theta = oracle::random_discrete_angles(seed, L);
  return fx;
}

}  // namespace

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw std::invalid_argument("slope fit needs at least two points");
  }
  const std::size_t k = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (double(k) * sxy - sx * sy) / (double(k) * sxx - sx * sx);
}

BenchReport run_bench(std::uint64_t seed) {
  BenchReport report;
  std::vector<double> xs, ys;

  const auto sweep_eval = [&](const std::string& name, const std::vector<std::size_t>& values,
                              auto&& make) {
    xs.clear();
    ys.clear();
    for (std::size_t v : values) {
      EvalFixture fx = make(v);
      Evaluator ev(fx.tmpl, fx.inst);
      const double t = time_per_call([&]() { fx.sink += ev.value(fx.theta); });
      report.points.push_back({name, double(v), t, 0});
      xs.push_back(double(v));
      ys.push_back(t);
    }
    return fit_loglog_slope(xs, ys);
  };

  report.exponent_n = sweep_eval("n", {8, 16, 32, 64, 128}, [&](std::size_t n) {
    return make_fixture(seed + n, n, 4, 2);
  });
  report.exponent_l = sweep_eval("L", {8, 16, 32, 64, 128}, [&](std::size_t L) {
    return make_fixture(seed + 1000 + L, 8, L, 2);
  });
  report.exponent_m = sweep_eval("m", {1, 2, 4, 8, 16}, [&](std::size_t m) {
    return make_fixture(seed + 2000 + m, 8, 8, m);
  });

  // N sweep times the full sampled estimate, single-threaded so the
  // scaling is not confounded by scheduling
  {
    xs.clear();
    ys.clear();
    EvalFixture fx = make_fixture(seed + 3000, 4, 4, 2);
    const InputPoint x("");
    for (std::int64_t N : {512, 1024, 2048, 4096, 8192}) {
      const auto samples = sample_parameters(4, N, seed);
      const double t = time_per_call(
          [&]() { fx.sink += estimate_ntk(fx.tmpl, x, x, samples, 1).value; }, 0.05);
      report.points.push_back({"N", double(N), t, 0});
      xs.push_back(double(N));
      ys.push_back(t);
    }
    report.exponent_samples = fit_loglog_slope(xs, ys);
  }
  return report;
}

std::string to_csv(const BenchReport& report) {
  std::ostringstream out;
  out << "sweep,value,seconds\n";
  out.precision(17);
  for (const auto& p : report.points) {
    out << p.sweep << "," << p.value << "," << p.seconds << "\n";
  }
  out << "# exponents: n=" << report.exponent_n << " L=" << report.exponent_l
      << " m=" << report.exponent_m << " N=" << report.exponent_samples << "\n";
  return out.str();
}

}  // namespace qntk::bench
