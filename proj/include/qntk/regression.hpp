#pragma once

#include <Eigen/Dense>
#include <limits>
#include <vector>

#include "qntk/estimator.hpp"

namespace qntk {

/// Labeled training data; duplicate inputs are rejected because they make
/// the training kernel singular.
struct TrainingSet {
  std::vector<InputPoint> inputs;
  Eigen::VectorXd labels;

  std::int64_t size() const { return std::int64_t(inputs.size()); }
  void validate() const;
};

/// Gradient-flow parameters: learning rate eta and training time t.
/// Infinite training time is the explicit sentinel infinite_time, never a
/// large float.
struct TrainingDynamicsConfig {
  double eta = 1.0;
  double t = std::numeric_limits<double>::infinity();

  static constexpr double infinite_time = std::numeric_limits<double>::infinity();
  bool infinite() const { return std::isinf(t); }
  void validate() const;
};

struct GramInversion {
  Eigen::MatrixXd inverse;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition_number = 0.0;
  double residual = 0.0;  // ||gram * inverse - I||_op
  bool condition_warning = false;
  double ridge = 0.0;  // nonzero only when explicitly requested
};

/// Inverts a symmetric Gram matrix via Cholesky with an eigendecomposition
/// fallback; throws SingularGramError when the matrix is singular or
/// indefinite (kernel regression needs an invertible training kernel).
/// An explicit ridge term, when requested, is added before inversion and
/// recorded in the result.
GramInversion invert_gram(const Eigen::MatrixXd& gram, double ridge = 0.0,
                          double condition_warn_threshold = 1e10);

/// Full trained-mean pipeline output.
struct MuEstimate {
  std::vector<double> mu;          // one value per query
  Eigen::MatrixXd gram;            // estimated K_train
  Eigen::MatrixXd query_rows;      // estimated K(queries, X_train^T)
  GramInversion inversion;
  std::int64_t sample_count = 0;
  std::uint64_t seed = 0;
  double max_std_error = 0.0;
  std::vector<KernelEstimate> query_mean_f;  // zero-mean audit, one per query
};

/// Infinite-training-time mean at each query: row(K_est) * K_train_est^{-1} * Y,
/// with both kernel estimates drawn from the one shared sample set.
MuEstimate estimate_mu_infinity(const CircuitTemplate& tmpl,
                                const std::vector<InputPoint>& queries,
                                const TrainingSet& training, const SampleSet& samples,
                                int workers = 0, double ridge = 0.0);

/// Same pipeline with the exact discrete-grid kernels instead of sampling.
MuEstimate enumerate_mu_infinity(const CircuitTemplate& tmpl,
                                 const std::vector<InputPoint>& queries,
                                 const TrainingSet& training, double ridge = 0.0);

/// Finite-time trained mean
///   mu_t = k_query^T K^{-1} (1 - exp(-t eta K)) Y,
/// evaluated through the symmetric eigendecomposition of K; t = infinity
/// reduces to the kernel-regression limit, t = 0 gives 0.
double mu_t(const Eigen::MatrixXd& k_train, const Eigen::VectorXd& k_query,
            const Eigen::VectorXd& labels, const TrainingDynamicsConfig& config);

/// Trained-process covariance at time t from the initial covariance kernel
/// k0 and the tangent kernel:
///   K_t(x,x') = k0(x,x') - k_x^T B k0(X,x') - k_x'^T B k0(X,x)
///             + k_x^T B k0(X,X^T) B k_x'
/// with B = K^{-1}(1 - exp(-t eta K)).
double covariance_t(const Eigen::MatrixXd& k_train, const Eigen::VectorXd& k_x,
                    const Eigen::VectorXd& k_xp, double k0_xxp,
                    const Eigen::VectorXd& k0_train_x, const Eigen::VectorXd& k0_train_xp,
                    const Eigen::MatrixXd& k0_train_train,
                    const TrainingDynamicsConfig& config);

}  // namespace qntk
