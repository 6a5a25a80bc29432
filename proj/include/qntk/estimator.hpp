#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qntk/circuit.hpp"
#include "qntk/sampling.hpp"

namespace qntk {

/// Monte-Carlo estimate of a scalar kernel quantity.
struct KernelEstimate {
  double value = 0.0;
  std::int64_t sample_count = 0;
  double variance = 0.0;   // per-sample, unbiased
  double std_error = 0.0;  // sqrt(variance / N)
};

/// Monte-Carlo estimate of the kernel Gram matrix on a list of inputs.
/// Every per-sample contribution is a gradient outer product, so the
/// estimate is symmetric positive semidefinite up to roundoff.
struct GramEstimate {
  Eigen::MatrixXd matrix;
  std::int64_t sample_count = 0;
  double max_std_error = 0.0;
};

/// Gradient inner product at fixed parameters, evaluated through the
/// parameter-shift differences (1/4) sum_i D_i(x) D_i(x').
double empirical_ntk(const CircuitTemplate& tmpl, const InputPoint& x,
                     const InputPoint& xp, const ParameterVector& theta);

/// Sampled mean of the empirical kernel: unbiased for the analytic kernel
/// under continuous-uniform initialization. Deterministic given the seed,
/// for any worker count.
KernelEstimate estimate_ntk(const CircuitTemplate& tmpl, const InputPoint& x,
                            const InputPoint& xp, const SampleSet& samples,
                            int workers = 0);

/// One pass over the samples computing all d gradient vectors per sample
/// and accumulating their outer products; entry (i,j) coincides with
/// estimate_ntk(x_i, x_j) under the same sample set.
GramEstimate estimate_gram(const CircuitTemplate& tmpl,
                           const std::vector<InputPoint>& inputs,
                           const SampleSet& samples, int workers = 0);

/// Sampled mean of f_theta(x); audits the zero-mean hypothesis behind the
/// sample-size constants.
KernelEstimate estimate_mean_f(const CircuitTemplate& tmpl, const InputPoint& x,
                               const SampleSet& samples, int workers = 0);

/// Sampled mean of f_theta(x) f_theta(x'): the covariance kernel of the
/// model at initialization (means reported separately for centering).
KernelEstimate estimate_k0(const CircuitTemplate& tmpl, const InputPoint& x,
                           const InputPoint& xp, const SampleSet& samples,
                           int workers = 0);

/// Exact averages over the full discrete parameter grid (4^L terms, in
/// lexicographic order with compensated summation). These equal the
/// continuous-uniform expectations exactly for this circuit family.
double enumerate_ntk(const CircuitTemplate& tmpl, const InputPoint& x,
                     const InputPoint& xp);
Eigen::MatrixXd enumerate_gram(const CircuitTemplate& tmpl,
                               const std::vector<InputPoint>& inputs);
double enumerate_mean_f(const CircuitTemplate& tmpl, const InputPoint& x);
double enumerate_k0(const CircuitTemplate& tmpl, const InputPoint& x,
                    const InputPoint& xp);

/// Samples needed so |K_est - K| < epsilon holds with probability 1-delta:
/// ceil(8 L^2 m^2 / (3 eps^2) * ln(2/delta)).
std::int64_t sample_size_ntk(double epsilon, double delta, std::int64_t L,
                             std::int64_t m);

/// Samples needed for the trained-mean estimate, from the two-term
/// Bernstein bound. feature_space_size > 1 switches to the uniform-over-X
/// variant (delta -> delta / |X| inside the logarithms). Throws
/// PreconditionError when epsilon exceeds its admissible upper bound
/// (L/2) sqrt(d_train) m^2 ||Y||_2 ||K_train^{-1}||_op.
std::int64_t sample_size_mu(double epsilon, double delta, std::int64_t L,
                            std::int64_t m, std::int64_t d_train,
                            double norm_kinv_op, double norm_y, double norm_kinv_y,
                            std::int64_t feature_space_size = 1);

/// Matrix Bernstein tail for the mean of N iid centered d1 x d2 matrices
/// with per-sample norm bound R and variance statistic nu:
/// min(1, (d1+d2) exp(-(N t^2 / 2) / (nu + R t / 3))).
double bernstein_tail(double t, std::int64_t N, double R, double nu, std::int64_t d1,
                      std::int64_t d2);

}  // namespace qntk
