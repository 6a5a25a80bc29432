#include "qntk/regression.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <set>

#include "qntk/errors.hpp"

namespace qntk {

void TrainingSet::validate() const {
  if (inputs.empty()) {
    throw std::invalid_argument("training set is empty");
  }
  if (labels.size() != Eigen::Index(inputs.size())) {
    throw std::invalid_argument("training labels/inputs length mismatch");
  }
  std::set<std::string> seen;
  for (const auto& x : inputs) {
    if (!seen.insert(x.bits()).second) {
      throw std::invalid_argument("duplicate training input \"" + x.bits() +
                                  "\": duplicates make the training kernel singular");
    }
  }
}

void TrainingDynamicsConfig::validate() const {
  if (!(eta > 0.0)) {
    throw std::invalid_argument("learning rate eta must be positive");
  }
  if (std::isnan(t) || t < 0.0) {
    throw std::invalid_argument("training time t must be nonnegative (or infinite)");
  }
}

GramInversion invert_gram(const Eigen::MatrixXd& gram, double ridge,
                          double condition_warn_threshold) {
  if (gram.rows() != gram.cols()) {
    throw std::invalid_argument("Gram matrix must be square");
  }
  if (!gram.isApprox(gram.transpose(), 1e-12)) {
    throw std::invalid_argument("Gram matrix must be symmetric");
  }
  Eigen::MatrixXd work = gram;
  if (ridge != 0.0) {
    if (ridge < 0.0) {
      throw std::invalid_argument("ridge term must be nonnegative");
    }
    work.diagonal().array() += ridge;
  }

  GramInversion out;
  out.ridge = ridge;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(work);
  if (es.info() != Eigen::Success) {
    throw SingularGramError("eigendecomposition of the Gram matrix failed");
  }
  out.lambda_min = es.eigenvalues().minCoeff();
  out.lambda_max = es.eigenvalues().maxCoeff();
  const double scale = std::max(std::abs(out.lambda_max), 1.0);
  if (out.lambda_min <= scale * 1e-14) {
    throw SingularGramError(
        "estimated kernel Gram matrix is singular or indefinite (lambda_min = " +
        std::to_string(out.lambda_min) +
        "); kernel regression requires an invertible training kernel");
  }
  out.condition_number = out.lambda_max / out.lambda_min;
  out.condition_warning = out.condition_number > condition_warn_threshold;

  Eigen::LLT<Eigen::MatrixXd> llt(work);
  if (llt.info() == Eigen::Success) {
    out.inverse = llt.solve(Eigen::MatrixXd::Identity(work.rows(), work.cols()));
  } else {
    // near the PD boundary Cholesky can fail where the eigendecomposition
    // is still usable
    out.inverse = es.eigenvectors() *
                  es.eigenvalues().cwiseInverse().asDiagonal() *
                  es.eigenvectors().transpose();
  }
  const Eigen::MatrixXd residual =
      work * out.inverse - Eigen::MatrixXd::Identity(work.rows(), work.cols());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(residual);
  out.residual = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  return out;
}

namespace {

MuEstimate mu_pipeline(const std::vector<InputPoint>& queries,
                       const TrainingSet& training, const Eigen::MatrixXd& joint,
                       std::int64_t sample_count, std::uint64_t seed, double max_std_error,
                       double ridge) {
  const std::size_t q = queries.size();
  const std::size_t d = std::size_t(training.size());
  MuEstimate out;
  out.sample_count = sample_count;
  out.seed = seed;
  out.max_std_error = max_std_error;
  out.gram = joint.bottomRightCorner(Eigen::Index(d), Eigen::Index(d));
  out.query_rows = joint.topRightCorner(Eigen::Index(q), Eigen::Index(d));
  out.inversion = invert_gram(out.gram, ridge);
  const Eigen::VectorXd weights = out.inversion.inverse * training.labels;
  out.mu.resize(q);
  for (std::size_t i = 0; i < q; ++i) {
    out.mu[i] = out.query_rows.row(Eigen::Index(i)).dot(weights);
  }
  return out;
}

std::vector<InputPoint> joint_inputs(const std::vector<InputPoint>& queries,
                                     const TrainingSet& training) {
  std::vector<InputPoint> all;
  all.reserve(queries.size() + std::size_t(training.size()));
  all.insert(all.end(), queries.begin(), queries.end());
  all.insert(all.end(), training.inputs.begin(), training.inputs.end());
  return all;
}

}  // namespace

MuEstimate estimate_mu_infinity(const CircuitTemplate& tmpl,
                                const std::vector<InputPoint>& queries,
                                const TrainingSet& training, const SampleSet& samples,
                                int workers, double ridge) {
  training.validate();
  if (queries.empty()) {
    throw std::invalid_argument("estimate_mu_infinity needs at least one query");
  }
  const auto all = joint_inputs(queries, training);
  GramEstimate joint = estimate_gram(tmpl, all, samples, workers);
  MuEstimate out = mu_pipeline(queries, training, joint.matrix, joint.sample_count,
                               samples.seed, joint.max_std_error, ridge);
  out.query_mean_f.reserve(queries.size());
  for (const auto& x : queries) {
    out.query_mean_f.push_back(estimate_mean_f(tmpl, x, samples, workers));
  }
  return out;
}

MuEstimate enumerate_mu_infinity(const CircuitTemplate& tmpl,
                                 const std::vector<InputPoint>& queries,
                                 const TrainingSet& training, double ridge) {
  training.validate();
  if (queries.empty()) {
    throw std::invalid_argument("enumerate_mu_infinity needs at least one query");
  }
  const auto all = joint_inputs(queries, training);
  const Eigen::MatrixXd joint = enumerate_gram(tmpl, all);
  const std::int64_t total = std::int64_t(1) << (2 * tmpl.num_parameters());
  MuEstimate out = mu_pipeline(queries, training, joint, total, 0, 0.0, ridge);
  out.query_mean_f.reserve(queries.size());
  for (const auto& x : queries) {
    KernelEstimate mean;
    mean.value = enumerate_mean_f(tmpl, x);
    mean.sample_count = total;
    out.query_mean_f.push_back(mean);
  }
  return out;
}

namespace {

// V diag(f(lambda)) V^T with f = (1 - exp(-t eta lambda)) / lambda,
// the f = 1/lambda limit at infinite time
Eigen::MatrixXd dynamics_operator(const Eigen::MatrixXd& k_train,
                                  const TrainingDynamicsConfig& config) {
  config.validate();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k_train);
  if (es.info() != Eigen::Success) {
    throw SingularGramError("eigendecomposition of the training kernel failed");
  }
  const Eigen::VectorXd& lambda = es.eigenvalues();
  if (lambda.minCoeff() <= 0.0) {
    throw SingularGramError("training kernel must be positive definite (lambda_min = " +
                            std::to_string(lambda.minCoeff()) + ")");
  }
  Eigen::VectorXd factors(lambda.size());
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (config.infinite()) {
      factors[i] = 1.0 / lambda[i];
    } else {
      factors[i] = -std::expm1(-config.t * config.eta * lambda[i]) / lambda[i];
    }
  }
  return es.eigenvectors() * factors.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

double mu_t(const Eigen::MatrixXd& k_train, const Eigen::VectorXd& k_query,
            const Eigen::VectorXd& labels, const TrainingDynamicsConfig& config) {
  if (k_train.rows() != k_query.size() || k_train.rows() != labels.size()) {
    throw std::invalid_argument("mu_t dimension mismatch");
  }
  if (!config.infinite() && config.t == 0.0) {
    return 0.0;
  }
  const Eigen::MatrixXd b = dynamics_operator(k_train, config);
  return k_query.dot(b * labels);
}

double covariance_t(const Eigen::MatrixXd& k_train, const Eigen::VectorXd& k_x,
                    const Eigen::VectorXd& k_xp, double k0_xxp,
                    const Eigen::VectorXd& k0_train_x, const Eigen::VectorXd& k0_train_xp,
                    const Eigen::MatrixXd& k0_train_train,
                    const TrainingDynamicsConfig& config) {
  const Eigen::Index d = k_train.rows();
  if (k_x.size() != d || k_xp.size() != d || k0_train_x.size() != d ||
      k0_train_xp.size() != d || k0_train_train.rows() != d ||
      k0_train_train.cols() != d) {
    throw std::invalid_argument("covariance_t dimension mismatch");
  }
  if (!config.infinite() && config.t == 0.0) {
    return k0_xxp;
  }
  const Eigen::MatrixXd b = dynamics_operator(k_train, config);
  const Eigen::VectorXd bx = b * k_x;
  const Eigen::VectorXd bxp = b * k_xp;
  return k0_xxp - bx.dot(k0_train_xp) - bxp.dot(k0_train_x) +
         bx.dot(k0_train_train * bxp);
}

}  // namespace qntk
