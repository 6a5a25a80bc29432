#include "qntk/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <numbers>
#include <stdexcept>

#include "qntk/accum.hpp"
#include "qntk/errors.hpp"
#include "qntk/estimator.hpp"

namespace qntk::oracle {

namespace {

constexpr std::complex<double> kI{0.0, 1.0};

std::uint64_t bits_to_mask(const BitVec& v, std::size_t n) {
  std::uint64_t mask = 0;
  for (std::size_t q = 0; q < n; ++q) {
    if (v.get(q)) {
      mask |= std::uint64_t(1) << q;
    }
  }
  return mask;
}

void check_qubit_cap(std::size_t n, const OracleCaps& caps) {
  if (n > caps.max_qubits) {
    throw PreconditionError("dense oracle capped at " + std::to_string(caps.max_qubits) +
                            " qubits (requested " + std::to_string(n) +
                            "); set QNTK_ORACLE_CAP_N to raise");
  }
}

std::int64_t checked_pow(std::int64_t base, std::size_t exp, std::int64_t cap,
                         const char* what) {
  std::int64_t v = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    v *= base;
    if (v > cap) {
      throw PreconditionError(std::string(what) + " grid exceeds cap of " +
                              std::to_string(cap) + " points");
    }
  }
  return v;
}

}  // namespace

OracleCaps default_caps() {
  OracleCaps caps;
  if (const char* env = std::getenv("QNTK_ORACLE_CAP_N")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0 && v <= 28) {
      caps.max_qubits = std::size_t(v);
    }
  }
  return caps;
}

DenseState::DenseState(std::size_t n) : n_(n), amp_(std::size_t(1) << n) {}

DenseState DenseState::zero_state(std::size_t n) {
  if (n == 0 || n > 28) {
    throw std::invalid_argument("dense state supports 1..28 qubits");
  }
  DenseState s(n);
  s.amp_[0] = 1.0;
  return s;
}

double DenseState::norm() const {
  double acc = 0.0;
  for (const auto& a : amp_) {
    acc += std::norm(a);
  }
  return std::sqrt(acc);
}

void DenseState::check_norm() const {
  if (std::abs(norm() - 1.0) > 1e-12) {
    throw std::runtime_error("dense state norm drifted from 1 (internal bug)");
  }
}

void DenseState::apply_gate(GateKind kind, std::size_t q0, std::size_t q1) {
  const std::size_t dim = amp_.size();
  const std::uint64_t b0 = std::uint64_t(1) << q0;
  const std::uint64_t b1 = std::uint64_t(1) << q1;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  switch (kind) {
    case GateKind::H:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (!(i & b0)) {
          const auto a0 = amp_[i];
          const auto a1 = amp_[i | b0];
          amp_[i] = inv_sqrt2 * (a0 + a1);
          amp_[i | b0] = inv_sqrt2 * (a0 - a1);
        }
      }
      break;
    case GateKind::S:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & b0) {
          amp_[i] *= kI;
        }
      }
      break;
    case GateKind::X:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (!(i & b0)) {
          std::swap(amp_[i], amp_[i | b0]);
        }
      }
      break;
    case GateKind::Y:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (!(i & b0)) {
          const auto a0 = amp_[i];
          const auto a1 = amp_[i | b0];
          amp_[i] = -kI * a1;
          amp_[i | b0] = kI * a0;
        }
      }
      break;
    case GateKind::Z:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if (i & b0) {
          amp_[i] = -amp_[i];
        }
      }
      break;
    case GateKind::Cnot:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & b0) && !(i & b1)) {
          std::swap(amp_[i], amp_[i | b1]);
        }
      }
      break;
    case GateKind::Cz:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & b0) && (i & b1)) {
          amp_[i] = -amp_[i];
        }
      }
      break;
    case GateKind::Swap:
      for (std::uint64_t i = 0; i < dim; ++i) {
        if ((i & b0) && !(i & b1)) {
          std::swap(amp_[i], amp_[(i & ~b0) | b1]);
        }
      }
      break;
  }
  check_norm();
}

void DenseState::apply_pauli(const PauliElement& p) {
  if (p.num_qubits() != n_) {
    throw std::invalid_argument("pauli/state qubit count mismatch");
  }
  const std::uint64_t zmask = bits_to_mask(p.z_bits(), n_);
  const std::uint64_t xmask = bits_to_mask(p.x_bits(), n_);
  std::complex<double> phase = p.epsilon() ? -1.0 : 1.0;
  if (p.delta()) {
    phase *= kI;
  }
  std::vector<std::complex<double>> out(amp_.size());
  for (std::uint64_t z = 0; z < amp_.size(); ++z) {
    const std::uint64_t target = z ^ xmask;
    // tau_a |z> = (-1)^{v.(z ^ w)} |z ^ w>
    const bool sign = std::popcount(zmask & target) & 1u;
    out[target] = (sign ? -phase : phase) * amp_[z];
  }
  amp_ = std::move(out);
}

void DenseState::apply_rotation(const PauliElement& generator, double theta) {
  if (!generator.is_hermitian()) {
    throw std::invalid_argument("rotation generator must be hermitian");
  }
  DenseState rotated = *this;
  rotated.apply_pauli(generator);
  const double c = std::cos(theta / 2.0);
  const std::complex<double> s = -kI * std::sin(theta / 2.0);
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    amp_[i] = c * amp_[i] + s * rotated.amp_[i];
  }
  check_norm();
}

std::complex<double> DenseState::expectation(const PauliElement& p) const {
  DenseState applied = *this;
  applied.apply_pauli(p);
  std::complex<double> acc = 0.0;
  for (std::size_t i = 0; i < amp_.size(); ++i) {
    acc += std::conj(amp_[i]) * applied.amp_[i];
  }
  return acc;
}

namespace {

void apply_layer_dense(DenseState& state, const CliffordLayerSpec& layer,
                       const InputPoint& x) {
  if (layer.is_explicit()) {
    throw PreconditionError(
        "the dense oracle supports gate-list layers only, not uploaded tableaux");
  }
  for (const auto& g : layer.gates) {
    if (g.if_bit && !x.bit(*g.if_bit)) {
      continue;
    }
    state.apply_gate(g.kind, g.q0, g.q1);
  }
}

DenseState run_circuit_dense(const CircuitTemplate& tmpl, const InputPoint& x,
                             const std::vector<double>& theta) {
  DenseState state = DenseState::zero_state(tmpl.n);
  for (std::size_t l = 0; l < tmpl.layers.size(); ++l) {
    apply_layer_dense(state, tmpl.layers[l], x);
    if (l < tmpl.num_parameters()) {
      state.apply_rotation(tmpl.generators[l], theta[l]);
    }
  }
  return state;
}

}  // namespace

double statevector_model(const CircuitTemplate& tmpl, const InputPoint& x,
                         const std::vector<double>& theta, const OracleCaps& caps) {
  tmpl.validate();
  check_qubit_cap(tmpl.n, caps);
  if (theta.size() != tmpl.num_parameters()) {
    throw std::invalid_argument("parameter vector has wrong length");
  }
  const DenseState state = run_circuit_dense(tmpl, x, theta);
  std::complex<double> acc = 0.0;
  for (const auto& term : tmpl.observable->terms()) {
    acc += term.coeff * state.expectation(term.pauli);
  }
  if (std::abs(acc.imag()) > 1e-10) {
    throw std::runtime_error("observable expectation has imaginary part " +
                             std::to_string(acc.imag()) + " (internal bug)");
  }
  return acc.real();
}

std::vector<double> statevector_gradient(const CircuitTemplate& tmpl, const InputPoint& x,
                                         const std::vector<double>& theta,
                                         const OracleCaps& caps) {
  const double half_pi = std::numbers::pi / 2.0;
  std::vector<double> out(theta.size());
  std::vector<double> shifted = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    shifted[i] = theta[i] + half_pi;
    const double plus = statevector_model(tmpl, x, shifted, caps);
    shifted[i] = theta[i] - half_pi;
    const double minus = statevector_model(tmpl, x, shifted, caps);
    shifted[i] = theta[i];
    out[i] = 0.5 * (plus - minus);
  }
  return out;
}

std::vector<double> finite_difference_gradient(const CircuitTemplate& tmpl,
                                               const InputPoint& x,
                                               const std::vector<double>& theta, double h,
                                               const OracleCaps& caps) {
  std::vector<double> out(theta.size());
  std::vector<double> shifted = theta;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    shifted[i] = theta[i] + h;
    const double plus = statevector_model(tmpl, x, shifted, caps);
    shifted[i] = theta[i] - h;
    const double minus = statevector_model(tmpl, x, shifted, caps);
    shifted[i] = theta[i];
    out[i] = (plus - minus) / (2.0 * h);
  }
  return out;
}

double exact_ntk_enumeration(const CircuitTemplate& tmpl, const InputPoint& x,
                             const InputPoint& xp, const OracleCaps& caps) {
  tmpl.validate();
  const std::size_t L = tmpl.num_parameters();
  const std::int64_t total =
      checked_pow(4, L, caps.max_enumeration, "discrete enumeration");
  const bool same = x == xp;
  auto inst_x = std::make_shared<const InstantiatedCircuit>(instantiate(tmpl, x));
  auto inst_xp = same ? inst_x
                      : std::make_shared<const InstantiatedCircuit>(instantiate(tmpl, xp));
  Evaluator ev_x(tmpl, inst_x);
  Evaluator ev_xp(tmpl, inst_xp);
  std::vector<double> gx(L), gxp(L);
  NeumaierSum sum;
  ParameterVector theta(L);
  for (std::int64_t idx = total - 1; idx >= 0; --idx) {
    for (std::size_t i = 0; i < L; ++i) {
      theta[i] = DiscreteAngle(int((idx >> (2 * i)) & 3));
    }
    ev_x.gradient(theta, gx);
    double dot = 0.0;
    if (same) {
      for (double g : gx) {
        dot += g * g;
      }
    } else {
      ev_xp.gradient(theta, gxp);
      for (std::size_t i = 0; i < L; ++i) {
        dot += gx[i] * gxp[i];
      }
    }
    sum.add(dot);
  }
  return sum.value() / double(total);
}

namespace {

template <class PerPoint>
double quadrature_mean(std::size_t L, int points_per_dim, std::int64_t cap,
                       PerPoint&& per_point) {
  if (points_per_dim < 5) {
    throw PreconditionError(
        "quadrature needs at least 5 points per dimension to integrate "
        "degree-2 harmonics independently of the 4-point grid");
  }
  const std::int64_t total = checked_pow(points_per_dim, L, cap, "quadrature");
  std::vector<double> theta(L, 0.0);
  std::vector<int> digits(L, 0);
  const double step = 2.0 * std::numbers::pi / points_per_dim;
  NeumaierSum sum;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    std::int64_t rest = idx;
    for (std::size_t i = 0; i < L; ++i) {
      digits[i] = int(rest % points_per_dim);
      rest /= points_per_dim;
      theta[i] = digits[i] * step;
    }
    sum.add(per_point(theta));
  }
  return sum.value() / double(total);
}

}  // namespace

double exact_ntk_quadrature(const CircuitTemplate& tmpl, const InputPoint& x,
                            const InputPoint& xp, int points_per_dim,
                            const OracleCaps& caps) {
  tmpl.validate();
  check_qubit_cap(tmpl.n, caps);
  const bool same = x == xp;
  return quadrature_mean(
      tmpl.num_parameters(), points_per_dim, caps.max_grid_points,
      [&](const std::vector<double>& theta) {
        const auto gx = statevector_gradient(tmpl, x, theta, caps);
        const auto gxp = same ? gx : statevector_gradient(tmpl, xp, theta, caps);
        double dot = 0.0;
        for (std::size_t i = 0; i < gx.size(); ++i) {
          dot += gx[i] * gxp[i];
        }
        return dot;
      });
}

double exact_mean_quadrature(const CircuitTemplate& tmpl, const InputPoint& x,
                             int points_per_dim, const OracleCaps& caps) {
  tmpl.validate();
  check_qubit_cap(tmpl.n, caps);
  return quadrature_mean(tmpl.num_parameters(), points_per_dim, caps.max_grid_points,
                         [&](const std::vector<double>& theta) {
                           return statevector_model(tmpl, x, theta, caps);
                         });
}

double exact_k0_quadrature(const CircuitTemplate& tmpl, const InputPoint& x,
                           const InputPoint& xp, int points_per_dim,
                           const OracleCaps& caps) {
  tmpl.validate();
  check_qubit_cap(tmpl.n, caps);
  const bool same = x == xp;
  return quadrature_mean(tmpl.num_parameters(), points_per_dim, caps.max_grid_points,
                         [&](const std::vector<double>& theta) {
                           const double fx = statevector_model(tmpl, x, theta, caps);
                           const double fxp =
                               same ? fx : statevector_model(tmpl, xp, theta, caps);
                           return fx * fxp;
                         });
}

double exact_mu_infinity(const CircuitTemplate& tmpl, const InputPoint& x,
                         const TrainingSet& training, const OracleCaps& caps) {
  training.validate();
  const std::int64_t d = training.size();
  Eigen::MatrixXd k_train(d, d);
  for (std::int64_t i = 0; i < d; ++i) {
    for (std::int64_t j = i; j < d; ++j) {
      const double v =
          exact_ntk_enumeration(tmpl, training.inputs[std::size_t(i)],
                                training.inputs[std::size_t(j)], caps);
      k_train(i, j) = v;
      k_train(j, i) = v;
    }
  }
  Eigen::VectorXd k_row(d);
  for (std::int64_t i = 0; i < d; ++i) {
    k_row[i] = exact_ntk_enumeration(tmpl, x, training.inputs[std::size_t(i)], caps);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(k_train);
  if (!lu.isInvertible()) {
    throw SingularGramError(
        "exact training kernel is singular; this instance has no well-defined "
        "trained mean (pick different training inputs)");
  }
  return k_row.dot(lu.solve(training.labels));
}

namespace {

struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(mix64(seed + 0x1234567890abcdefULL)) {}
  std::uint64_t next() { return splitmix64(state); }
  // uniform integer in [0, n)
  std::size_t below(std::size_t n) { return std::size_t(next() % n); }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform_pm1() { return 2.0 * uniform() - 1.0; }
};

PauliElement random_hermitian_pauli(Rng& rng, std::size_t n) {
  static const char letters[4] = {'I', 'X', 'Y', 'Z'};
  std::string s;
  do {
    s.clear();
    for (std::size_t q = 0; q < n; ++q) {
      s.push_back(letters[rng.below(4)]);
    }
  } while (s.find_first_not_of('I') == std::string::npos);
  return from_pauli_string(s);
}

}  // namespace

CircuitTemplate random_template(std::uint64_t seed, const RandomTemplateSpec& spec) {
  Rng rng(seed);
  CircuitTemplate tmpl;
  tmpl.n = spec.n;
  tmpl.input_bits = spec.input_bits;
  tmpl.layers.resize(spec.num_parameters + 1);
  for (auto& layer : tmpl.layers) {
    layer.gates.reserve(spec.gates_per_layer);
    for (std::size_t g = 0; g < spec.gates_per_layer; ++g) {
      GateApplication app;
      // two-qubit gates need two distinct targets
      const std::size_t kind_count = spec.n >= 2 ? 8 : 5;
      static const GateKind one_qubit[5] = {GateKind::H, GateKind::S, GateKind::X,
                                            GateKind::Y, GateKind::Z};
      static const GateKind all_kinds[8] = {GateKind::H,    GateKind::S,
                                            GateKind::Cnot, GateKind::Cz,
                                            GateKind::Swap, GateKind::X,
                                            GateKind::Y,    GateKind::Z};
      app.kind = spec.n >= 2 ? all_kinds[rng.below(kind_count)]
                             : one_qubit[rng.below(kind_count)];
      app.q0 = rng.below(spec.n);
      if (gate_is_two_qubit(app.kind)) {
        do {
          app.q1 = rng.below(spec.n);
        } while (app.q1 == app.q0);
      }
      if (spec.allow_guards && spec.input_bits > 0 && rng.below(4) == 0) {
        app.if_bit = rng.below(spec.input_bits);
      }
      layer.gates.push_back(app);
    }
  }
  tmpl.generators.reserve(spec.num_parameters);
  for (std::size_t l = 0; l < spec.num_parameters; ++l) {
    tmpl.generators.push_back(random_hermitian_pauli(rng, spec.n));
  }
  std::vector<Observable::Term> terms;
  terms.reserve(spec.num_terms);
  for (std::size_t k = 0; k < spec.num_terms; ++k) {
    terms.push_back({rng.uniform_pm1(), random_hermitian_pauli(rng, spec.n)});
  }
  tmpl.observable = std::make_shared<const Observable>(std::move(terms));
  tmpl.validate();
  return tmpl;
}

PauliElement random_signed_pauli(std::uint64_t seed, std::size_t n) {
  Rng rng(seed ^ 0x0f0f0f0f0f0f0f0fULL);
  BitVec z(n), x(n);
  for (std::size_t q = 0; q < n; ++q) {
    z.set(q, rng.below(2));
    x.set(q, rng.below(2));
  }
  return PauliElement(n, rng.below(2), rng.below(2), std::move(z), std::move(x));
}

PauliElement random_hermitian_pauli_element(std::uint64_t seed, std::size_t n) {
  Rng rng(seed ^ 0xf0f0f0f0f0f0f0f0ULL);
  return random_hermitian_pauli(rng, n);
}

CircuitTemplate cos_theta_template() {
  CircuitTemplate tmpl;
  tmpl.n = 1;
  tmpl.input_bits = 0;
  tmpl.layers.resize(2);
  tmpl.layers[0].gates.push_back({GateKind::H, 0, 0, std::nullopt});
  tmpl.layers[1].gates.push_back({GateKind::H, 0, 0, std::nullopt});
  tmpl.generators.push_back(from_pauli_string("Z"));
  tmpl.observable = std::make_shared<const Observable>(
      std::vector<Observable::Term>{{1.0, from_pauli_string("Z")}});
  tmpl.validate();
  return tmpl;
}

double final_state_norm(const CircuitTemplate& tmpl, const InputPoint& x,
                        const std::vector<double>& theta, const OracleCaps& caps) {
  tmpl.validate();
  check_qubit_cap(tmpl.n, caps);
  return run_circuit_dense(tmpl, x, theta).norm();
}

InputPoint random_input(std::uint64_t seed, std::size_t bits) {
  Rng rng(seed ^ 0xfeedface12345678ULL);
  std::string s;
  s.reserve(bits);
  for (std::size_t i = 0; i < bits; ++i) {
    s.push_back(rng.below(2) ? '1' : '0');
  }
  return InputPoint(std::move(s));
}

ParameterVector random_discrete_angles(std::uint64_t seed, std::size_t L) {
  Rng rng(seed ^ 0xabcdef0987654321ULL);
  ParameterVector theta(L);
  for (auto& a : theta) {
    a = DiscreteAngle(int(rng.below(4)));
  }
  return theta;
}

std::vector<double> random_continuous_angles(std::uint64_t seed, std::size_t L) {
  Rng rng(seed ^ 0x5555aaaa5555aaaaULL);
  std::vector<double> theta(L);
  for (auto& a : theta) {
    a = rng.uniform() * 2.0 * std::numbers::pi;
  }
  return theta;
}

}  // namespace qntk::oracle
