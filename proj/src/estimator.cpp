#include "qntk/estimator.hpp"

#include <cmath>
#include <memory>

#include "qntk/accum.hpp"
#include "qntk/errors.hpp"
#include "qntk/parallel.hpp"

namespace qntk {

namespace {

std::shared_ptr<const InstantiatedCircuit> instantiate_shared(const CircuitTemplate& tmpl,
                                                              const InputPoint& x) {
  return std::make_shared<const InstantiatedCircuit>(instantiate(tmpl, x));
}

void check_sample_set(const CircuitTemplate& tmpl, const SampleSet& samples) {
  if (samples.num_parameters != tmpl.num_parameters()) {
    throw std::invalid_argument("sample set was drawn for a different parameter count");
  }
  if (samples.count < 1) {
    throw std::invalid_argument("sample set is empty");
  }
}

void check_enumeration_size(const CircuitTemplate& tmpl) {
  if (tmpl.num_parameters() > 15) {
    throw std::invalid_argument("full enumeration over 4^L grid is infeasible for L > 15");
  }
}

void enumeration_angles(std::int64_t index, std::size_t L, ParameterVector& out) {
  out.resize(L);
  for (std::size_t i = 0; i < L; ++i) {
    out[i] = DiscreteAngle(int((index >> (2 * i)) & 3));
  }
}

// Mean of a per-sample scalar over a SampleSet, chunked and compensated.
template <class PerSample>
KernelEstimate sampled_mean(const SampleSet& samples, int workers,
                            PerSample&& per_sample) {
  const std::int64_t total = samples.count;
  const std::int64_t nchunks = chunk_count_for(total);
  std::vector<MeanVarAccumulator> parts(std::size_t(nchunks));
  for_each_chunk(total, workers, [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
    auto state = per_sample.make_state();
    MeanVarAccumulator acc;
    ParameterVector theta;
    for (std::int64_t j = begin; j < end; ++j) {
      samples.angles(j, theta);
      acc.add(per_sample(state, theta));
    }
    parts[std::size_t(c)] = acc;
  });
  MeanVarAccumulator all;
  for (const auto& part : parts) {
    all.s1.add(part.s1.value());
    all.s2.add(part.s2.value());
    all.count += part.count;
  }
  KernelEstimate est;
  est.sample_count = all.count;
  est.value = all.mean();
  est.variance = all.variance();
  est.std_error = all.std_error();
  return est;
}

struct PairGradientSampler {
  const CircuitTemplate* tmpl;
  std::shared_ptr<const InstantiatedCircuit> inst_x;
  std::shared_ptr<const InstantiatedCircuit> inst_xp;
  bool same_input;

  struct State {
    Evaluator ev_x;
    Evaluator ev_xp;
    std::vector<double> gx;
    std::vector<double> gxp;
  };

  State make_state() const {
    return State{Evaluator(*tmpl, inst_x), Evaluator(*tmpl, inst_xp),
                 std::vector<double>(tmpl->num_parameters()),
                 std::vector<double>(tmpl->num_parameters())};
  }

  double operator()(State& st, const ParameterVector& theta) const {
    st.ev_x.gradient(theta, st.gx);
    double dot = 0.0;
    if (same_input) {
      for (double g : st.gx) {
        dot += g * g;
      }
      return dot;
    }
    st.ev_xp.gradient(theta, st.gxp);
    for (std::size_t i = 0; i < st.gx.size(); ++i) {
      dot += st.gx[i] * st.gxp[i];
    }
    return dot;
  }
};

struct ValueSampler {
  const CircuitTemplate* tmpl;
  std::shared_ptr<const InstantiatedCircuit> inst_x;

  struct State {
    Evaluator ev;
  };
  State make_state() const { return State{Evaluator(*tmpl, inst_x)}; }
  double operator()(State& st, const ParameterVector& theta) const {
    return st.ev.value(theta);
  }
};

struct ProductSampler {
  const CircuitTemplate* tmpl;
  std::shared_ptr<const InstantiatedCircuit> inst_x;
  std::shared_ptr<const InstantiatedCircuit> inst_xp;
  bool same_input;

  struct State {
    Evaluator ev_x;
    Evaluator ev_xp;
  };
  State make_state() const {
    return State{Evaluator(*tmpl, inst_x), Evaluator(*tmpl, inst_xp)};
  }
  double operator()(State& st, const ParameterVector& theta) const {
    const double fx = st.ev_x.value(theta);
    const double fxp = same_input ? fx : st.ev_xp.value(theta);
    return fx * fxp;
  }
};

}  // namespace

double empirical_ntk(const CircuitTemplate& tmpl, const InputPoint& x,
                     const InputPoint& xp, const ParameterVector& theta) {
  tmpl.validate();
  PairGradientSampler sampler{&tmpl, instantiate_shared(tmpl, x), nullptr, x == xp};
  sampler.inst_xp = sampler.same_input ? sampler.inst_x : instantiate_shared(tmpl, xp);
  auto state = sampler.make_state();
  return sampler(state, theta);
}

KernelEstimate estimate_ntk(const CircuitTemplate& tmpl, const InputPoint& x,
                            const InputPoint& xp, const SampleSet& samples,
                            int workers) {
  tmpl.validate();
  check_sample_set(tmpl, samples);
  PairGradientSampler sampler{&tmpl, instantiate_shared(tmpl, x), nullptr, x == xp};
  sampler.inst_xp = sampler.same_input ? sampler.inst_x : instantiate_shared(tmpl, xp);
  return sampled_mean(samples, workers, sampler);
}

KernelEstimate estimate_mean_f(const CircuitTemplate& tmpl, const InputPoint& x,
                               const SampleSet& samples, int workers) {
  tmpl.validate();
  check_sample_set(tmpl, samples);
  ValueSampler sampler{&tmpl, instantiate_shared(tmpl, x)};
  return sampled_mean(samples, workers, sampler);
}

KernelEstimate estimate_k0(const CircuitTemplate& tmpl, const InputPoint& x,
                           const InputPoint& xp, const SampleSet& samples,
                           int workers) {
  tmpl.validate();
  check_sample_set(tmpl, samples);
  ProductSampler sampler{&tmpl, instantiate_shared(tmpl, x), nullptr, x == xp};
  sampler.inst_xp = sampler.same_input ? sampler.inst_x : instantiate_shared(tmpl, xp);
  return sampled_mean(samples, workers, sampler);
}

GramEstimate estimate_gram(const CircuitTemplate& tmpl,
                           const std::vector<InputPoint>& inputs,
                           const SampleSet& samples, int workers) {
  tmpl.validate();
  check_sample_set(tmpl, samples);
  if (inputs.empty()) {
    throw std::invalid_argument("estimate_gram needs at least one input");
  }
  const std::size_t d = inputs.size();
  const std::size_t L = tmpl.num_parameters();

  std::vector<std::shared_ptr<const InstantiatedCircuit>> insts;
  insts.reserve(d);
  for (const auto& x : inputs) {
    insts.push_back(instantiate_shared(tmpl, x));
  }

  struct Chunk {
    std::vector<NeumaierSum> sum;    // d*d entries, row major
    std::vector<NeumaierSum> sumsq;  // diagnostics for the standard errors
    std::int64_t count = 0;
  };
  const std::int64_t total = samples.count;
  const std::int64_t nchunks = chunk_count_for(total);
  std::vector<Chunk> parts(std::size_t(nchunks));

  for_each_chunk(total, workers, [&](std::int64_t c, std::int64_t begin, std::int64_t end) {
    Chunk chunk;
    chunk.sum.assign(d * d, NeumaierSum{});
    chunk.sumsq.assign(d * d, NeumaierSum{});
    std::vector<Evaluator> evals;
    evals.reserve(d);
    for (std::size_t i = 0; i < d; ++i) {
      evals.emplace_back(tmpl, insts[i]);
    }
    std::vector<double> grads(d * L);
    ParameterVector theta;
    for (std::int64_t j = begin; j < end; ++j) {
      samples.angles(j, theta);
      for (std::size_t i = 0; i < d; ++i) {
        evals[i].gradient(theta, std::span<double>(grads.data() + i * L, L));
      }
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
          double dot = 0.0;
          for (std::size_t l = 0; l < L; ++l) {
            dot += grads[a * L + l] * grads[b * L + l];
          }
          chunk.sum[a * d + b].add(dot);
          chunk.sumsq[a * d + b].add(dot * dot);
        }
      }
      ++chunk.count;
    }
    parts[std::size_t(c)] = std::move(chunk);
  });

  std::vector<MeanVarAccumulator> entries(d * d);
  std::int64_t count = 0;
  for (const auto& part : parts) {
    for (std::size_t e = 0; e < d * d; ++e) {
      entries[e].s1.add(part.sum[e].value());
      entries[e].s2.add(part.sumsq[e].value());
    }
    count += part.count;
  }
  for (auto& e : entries) {
    e.count = count;
  }

  GramEstimate est;
  est.sample_count = count;
  est.matrix.resize(Eigen::Index(d), Eigen::Index(d));
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      const auto& acc = entries[a * d + b];
      est.matrix(Eigen::Index(a), Eigen::Index(b)) = acc.mean();
      est.matrix(Eigen::Index(b), Eigen::Index(a)) = acc.mean();
      est.max_std_error = std::max(est.max_std_error, acc.std_error());
    }
  }
  return est;
}

double enumerate_ntk(const CircuitTemplate& tmpl, const InputPoint& x,
                     const InputPoint& xp) {
  tmpl.validate();
  check_enumeration_size(tmpl);
  const std::size_t L = tmpl.num_parameters();
  const std::int64_t total = std::int64_t(1) << (2 * L);
  PairGradientSampler sampler{&tmpl, instantiate_shared(tmpl, x), nullptr, x == xp};
  sampler.inst_xp = sampler.same_input ? sampler.inst_x : instantiate_shared(tmpl, xp);
  auto state = sampler.make_state();
  NeumaierSum sum;
  ParameterVector theta;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    enumeration_angles(idx, L, theta);
    sum.add(sampler(state, theta));
  }
  return sum.value() / double(total);
}

Eigen::MatrixXd enumerate_gram(const CircuitTemplate& tmpl,
                               const std::vector<InputPoint>& inputs) {
  tmpl.validate();
  check_enumeration_size(tmpl);
  const std::size_t d = inputs.size();
  const std::size_t L = tmpl.num_parameters();
  const std::int64_t total = std::int64_t(1) << (2 * L);

  std::vector<Evaluator> evals;
  evals.reserve(d);
  for (const auto& x : inputs) {
    evals.emplace_back(tmpl, instantiate_shared(tmpl, x));
  }
  std::vector<double> grads(d * L);
  std::vector<NeumaierSum> sums(d * d);
  ParameterVector theta;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    enumeration_angles(idx, L, theta);
    for (std::size_t i = 0; i < d; ++i) {
      evals[i].gradient(theta, std::span<double>(grads.data() + i * L, L));
    }
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = a; b < d; ++b) {
        double dot = 0.0;
        for (std::size_t l = 0; l < L; ++l) {
          dot += grads[a * L + l] * grads[b * L + l];
        }
        sums[a * d + b].add(dot);
      }
    }
  }
  Eigen::MatrixXd gram(d, d);
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t b = a; b < d; ++b) {
      const double v = sums[a * d + b].value() / double(total);
      gram(Eigen::Index(a), Eigen::Index(b)) = v;
      gram(Eigen::Index(b), Eigen::Index(a)) = v;
    }
  }
  return gram;
}

double enumerate_mean_f(const CircuitTemplate& tmpl, const InputPoint& x) {
  tmpl.validate();
  check_enumeration_size(tmpl);
  const std::size_t L = tmpl.num_parameters();
  const std::int64_t total = std::int64_t(1) << (2 * L);
  Evaluator ev(tmpl, instantiate_shared(tmpl, x));
  NeumaierSum sum;
  ParameterVector theta;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    enumeration_angles(idx, L, theta);
    sum.add(ev.value(theta));
  }
  return sum.value() / double(total);
}

double enumerate_k0(const CircuitTemplate& tmpl, const InputPoint& x,
                    const InputPoint& xp) {
  tmpl.validate();
  check_enumeration_size(tmpl);
  const std::size_t L = tmpl.num_parameters();
  const std::int64_t total = std::int64_t(1) << (2 * L);
  Evaluator ev_x(tmpl, instantiate_shared(tmpl, x));
  const bool same = x == xp;
  Evaluator ev_xp(tmpl, same ? instantiate_shared(tmpl, x) : instantiate_shared(tmpl, xp));
  NeumaierSum sum;
  ParameterVector theta;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    enumeration_angles(idx, L, theta);
    const double fx = ev_x.value(theta);
    sum.add(same ? fx * fx : fx * ev_xp.value(theta));
  }
  return sum.value() / double(total);
}

std::int64_t sample_size_ntk(double epsilon, double delta, std::int64_t L,
                             std::int64_t m) {
  if (!(epsilon > 0.0)) {
    throw PreconditionError("epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("delta must lie in (0, 1)");
  }
  if (L < 1 || m < 1) {
    throw PreconditionError("L and m must be >= 1");
  }
  const double value = 8.0 * double(L) * double(L) * double(m) * double(m) /
                       (3.0 * epsilon * epsilon) * std::log(2.0 / delta);
  return std::int64_t(std::ceil(value));
}

std::int64_t sample_size_mu(double epsilon, double delta, std::int64_t L,
                            std::int64_t m, std::int64_t d_train, double norm_kinv_op,
                            double norm_y, double norm_kinv_y,
                            std::int64_t feature_space_size) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("delta must lie in (0, 1)");
  }
  if (L < 1 || m < 1 || d_train < 1 || feature_space_size < 1) {
    throw PreconditionError("L, m, d_train and feature_space_size must be >= 1");
  }
  if (!(norm_kinv_op > 0.0) || !(norm_y > 0.0) || !(norm_kinv_y > 0.0)) {
    throw PreconditionError("the norms ||K_train^{-1}||_op, ||Y||_2, ||K_train^{-1}Y||_2 "
                            "must be positive");
  }
  const double dd = double(d_train);
  const double eps_max =
      0.5 * double(L) * std::sqrt(dd) * double(m) * double(m) * norm_y * norm_kinv_op;
  if (!(epsilon > 0.0) || !(epsilon < eps_max)) {
    throw PreconditionError(
        "epsilon must satisfy 0 < epsilon < (L/2) sqrt(d_train) m^2 ||Y||_2 "
        "||K_train^{-1}||_op = " +
        std::to_string(eps_max));
  }
  const double X = double(feature_space_size);
  const double R = 2.0 * double(L) * std::sqrt(dd) * double(m) * double(m) * norm_kinv_y;
  const double term1 = (24.0 * R * R + 4.0 * R * epsilon) / (3.0 * epsilon * epsilon) *
                       std::log(2.0 * X * (1.0 + dd) / delta);
  const double one_plus_sqrt2 = 1.0 + std::sqrt(2.0);
  const double c4 = one_plus_sqrt2 * one_plus_sqrt2 * one_plus_sqrt2 * one_plus_sqrt2;
  const double L4 = double(L) * double(L) * double(L) * double(L);
  const double m8 = std::pow(double(m), 8);
  const double kinv4 = std::pow(norm_kinv_op, 4);
  const double term2 = 2.0 * c4 * L4 * dd * dd * dd * m8 * kinv4 * norm_y * norm_y /
                       (3.0 * epsilon * epsilon) * std::log(4.0 * X * dd / delta);
  return std::int64_t(std::ceil(term1 + term2));
}

double bernstein_tail(double t, std::int64_t N, double R, double nu, std::int64_t d1,
                      std::int64_t d2) {
  if (t < 0.0) {
    throw PreconditionError("deviation t must be nonnegative");
  }
  if (!(R > 0.0)) {
    throw PreconditionError("norm bound R must be positive");
  }
  if (nu < 0.0) {
    throw PreconditionError("variance statistic nu must be nonnegative");
  }
  if (N < 1 || d1 < 1 || d2 < 1) {
    throw PreconditionError("N, d1, d2 must be >= 1");
  }
  if (t == 0.0) {
    return 1.0;
  }
  const double denom = nu + R * t / 3.0;
  const double bound = double(d1 + d2) * std::exp(-(double(N) * t * t / 2.0) / denom);
  return std::min(1.0, bound);
}

}  // namespace qntk
