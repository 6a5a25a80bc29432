#include "qntk/verify.hpp"

#include <algorithm>
#include <cmath>

#include "qntk/estimator.hpp"
#include "qntk/sampling.hpp"

namespace qntk::verify {

using oracle::RandomTemplateSpec;

namespace {

struct Check {
  CheckResult result;
  explicit Check(std::string name, double tolerance) {
    result.name = std::move(name);
    result.tolerance = tolerance;
    result.passed = true;
  }
  void observe(double discrepancy, const std::string& context) {
    ++result.cases;
    if (discrepancy > result.worst) {
      result.worst = discrepancy;
    }
    if (discrepancy > result.tolerance && result.detail.empty()) {
      result.passed = false;
      result.detail = context + " deviates by " + std::to_string(discrepancy);
    }
  }
};

RandomTemplateSpec small_spec(std::uint64_t& mixer, std::size_t max_n, std::size_t max_l,
                              std::size_t max_m) {
  RandomTemplateSpec spec;
  spec.n = 1 + mix64(mixer += 11) % max_n;
  spec.num_parameters = 1 + mix64(mixer += 13) % max_l;
  spec.num_terms = 1 + mix64(mixer += 17) % max_m;
  spec.gates_per_layer = 2 * spec.n;
  spec.input_bits = spec.n;
  return spec;
}

CheckResult check_stabilizer_vs_dense(const VerifyOptions& opts) {
  Check check("stabilizer-vs-dense", 1e-12);
  // pinned first case so the phase-bug negative control always trips
  {
    CircuitTemplate tmpl = oracle::cos_theta_template();
    CircuitTemplate stab_tmpl = tmpl;
    if (opts.inject_phase_bug) {
      auto terms = tmpl.observable->terms();
      terms[0].pauli.negate();
      stab_tmpl.observable = std::make_shared<const Observable>(std::move(terms));
    }
    const InputPoint x("");
    const ParameterVector theta{DiscreteAngle(0)};
    const double stab = evaluate_model(stab_tmpl, x, theta);
    const double dense = oracle::statevector_model(tmpl, x, {0.0}, opts.caps);
    check.observe(std::abs(stab - dense), "pinned single-qubit case");
  }
  std::uint64_t mixer = opts.seed;
  for (int c = 0; c < 300; ++c) {
    const auto spec = small_spec(mixer, 5, 6, 4);
    const auto tmpl = oracle::random_template(opts.seed + std::uint64_t(c), spec);
    const auto x = oracle::random_input(opts.seed + std::uint64_t(c), spec.input_bits);
    const auto theta =
        oracle::random_discrete_angles(opts.seed + std::uint64_t(c), spec.num_parameters);
    std::vector<double> theta_real(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta_real[i] = theta[i].radians();
    }
    const double stab = evaluate_model(tmpl, x, theta);
    const double dense = oracle::statevector_model(tmpl, x, theta_real, opts.caps);
    check.observe(std::abs(stab - dense), "case " + std::to_string(c));
  }
  return check.result;
}

CheckResult check_enumeration_vs_quadrature(const VerifyOptions& opts) {
  Check check("discrete-average-vs-quadrature", 1e-9);
  std::uint64_t mixer = opts.seed ^ 0xaaaa;
  for (int c = 0; c < 25; ++c) {
    auto spec = small_spec(mixer, 3, 3, 2);
    const auto tmpl = oracle::random_template(opts.seed + 1000 + std::uint64_t(c), spec);
    const auto x = oracle::random_input(opts.seed + 2000 + std::uint64_t(c), spec.input_bits);
    const auto xp = oracle::random_input(opts.seed + 3000 + std::uint64_t(c), spec.input_bits);
    const double enumd = oracle::exact_ntk_enumeration(tmpl, x, xp, opts.caps);
    const double quad = oracle::exact_ntk_quadrature(tmpl, x, xp, 8, opts.caps);
    check.observe(std::abs(enumd - quad), "case " + std::to_string(c));
  }
  return check.result;
}

CheckResult check_parameter_shift(const VerifyOptions& opts) {
  Check check("parameter-shift-vs-finite-difference", 1e-6);
  std::uint64_t mixer = opts.seed ^ 0xbbbb;
  for (int c = 0; c < 40; ++c) {
    auto spec = small_spec(mixer, 3, 4, 2);
    const auto tmpl = oracle::random_template(opts.seed + 4000 + std::uint64_t(c), spec);
    const auto x = oracle::random_input(opts.seed + 5000 + std::uint64_t(c), spec.input_bits);
    const auto theta =
        oracle::random_continuous_angles(opts.seed + 6000 + std::uint64_t(c), spec.num_parameters);
    const auto shift = oracle::statevector_gradient(tmpl, x, theta, opts.caps);
    const auto fd = oracle::finite_difference_gradient(tmpl, x, theta, 1e-5, opts.caps);
    for (std::size_t i = 0; i < shift.size(); ++i) {
      check.observe(std::abs(shift[i] - fd[i]),
                    "case " + std::to_string(c) + " component " + std::to_string(i));
    }
  }
  return check.result;
}

CheckResult check_quadrature_bandlimit(const VerifyOptions& opts) {
  Check check("quadrature-bandlimit", 1e-10);
  std::uint64_t mixer = opts.seed ^ 0xcccc;
  for (int c = 0; c < 8; ++c) {
    auto spec = small_spec(mixer, 3, 2, 2);
    const auto tmpl = oracle::random_template(opts.seed + 7000 + std::uint64_t(c), spec);
    const auto x = oracle::random_input(opts.seed + 8000 + std::uint64_t(c), spec.input_bits);
    const auto xp = oracle::random_input(opts.seed + 9000 + std::uint64_t(c), spec.input_bits);
    const double p5 = oracle::exact_ntk_quadrature(tmpl, x, xp, 5, opts.caps);
    const double p8 = oracle::exact_ntk_quadrature(tmpl, x, xp, 8, opts.caps);
    const double p16 = oracle::exact_ntk_quadrature(tmpl, x, xp, 16, opts.caps);
    check.observe(std::abs(p5 - p8), "case " + std::to_string(c) + " P=5 vs P=8");
    check.observe(std::abs(p8 - p16), "case " + std::to_string(c) + " P=8 vs P=16");
  }
  return check.result;
}

CheckResult check_pauli_associativity(const VerifyOptions& opts) {
  Check check("pauli-associativity", 0.0);
  std::uint64_t mixer = opts.seed ^ 0xdddd;
  for (int c = 0; c < 2000; ++c) {
    const std::size_t n = 1 + mix64(mixer += 7) % 64;
    const auto p = oracle::random_signed_pauli(mix64(mixer += 1), n);
    const auto q = oracle::random_signed_pauli(mix64(mixer += 1), n);
    const auto r = oracle::random_signed_pauli(mix64(mixer += 1), n);
    const bool ok = pauli_mul(pauli_mul(p, q), r) == pauli_mul(p, pauli_mul(q, r));
    check.observe(ok ? 0.0 : 1.0, "case " + std::to_string(c));
  }
  return check.result;
}

CheckResult check_tableau_invariants(const VerifyOptions& opts) {
  Check symplectic("symplectic-preservation", 0.0);
  Check commutation("commutation-preservation", 0.0);
  Check hermiticity("hermiticity-preservation", 0.0);
  std::uint64_t mixer = opts.seed ^ 0xeeee;
  for (int c = 0; c < 400; ++c) {
    const std::size_t n = 1 + mix64(mixer += 3) % 6;
    RandomTemplateSpec spec;
    spec.n = n;
    spec.num_parameters = 1;
    spec.gates_per_layer = 2 * n;
    spec.input_bits = 0;
    spec.allow_guards = false;
    const auto tmpl = oracle::random_template(opts.seed + 10000 + std::uint64_t(c), spec);
    const auto inst = instantiate(tmpl, InputPoint(""));
    for (const auto& tab : inst.forward) {
      symplectic.observe(tab.is_symplectic() ? 0.0 : 1.0, "case " + std::to_string(c));
      const auto p = oracle::random_signed_pauli(mix64(mixer += 5), n);
      const auto q = oracle::random_signed_pauli(mix64(mixer += 5), n);
      const bool comm_ok =
          commutes(p, q) == commutes(tab.conjugate(p), tab.conjugate(q));
      commutation.observe(comm_ok ? 0.0 : 1.0, "case " + std::to_string(c));
      const auto h = oracle::random_hermitian_pauli_element(mix64(mixer += 5), n);
      hermiticity.observe(tab.conjugate(h).is_hermitian() ? 0.0 : 1.0,
                          "case " + std::to_string(c));
      const auto gen = oracle::random_hermitian_pauli_element(mix64(mixer += 5), n);
      const auto rot = rotation_conjugate(gen, DiscreteAngle(int(mix64(mixer += 5) % 4)), h);
      hermiticity.observe(rot.is_hermitian() ? 0.0 : 1.0,
                          "rotation case " + std::to_string(c));
    }
  }
  // merged report: all three must hold
  CheckResult out = symplectic.result;
  out.name = "algebraic-invariants";
  out.cases += commutation.result.cases + hermiticity.result.cases;
  out.passed = symplectic.result.passed && commutation.result.passed &&
               hermiticity.result.passed;
  out.worst = std::max({symplectic.result.worst, commutation.result.worst,
                        hermiticity.result.worst});
  if (!out.passed && out.detail.empty()) {
    out.detail = !symplectic.result.passed   ? symplectic.result.detail
                 : !commutation.result.passed ? commutation.result.detail
                                              : hermiticity.result.detail;
  }
  return out;
}

CheckResult check_zero_state_expectation(const VerifyOptions& opts) {
  Check check("zero-state-expectation-vs-dense", 1e-12);
  std::uint64_t mixer = opts.seed ^ 0x1111;
  for (int c = 0; c < 500; ++c) {
    const std::size_t n = 1 + mix64(mixer += 9) % 3;
    const auto p = oracle::random_hermitian_pauli_element(mix64(mixer += 9), n);
    const auto state = oracle::DenseState::zero_state(n);
    const auto dense = state.expectation(p);
    const double stab = expectation_zero_state(p);
    check.observe(std::abs(dense.real() - stab) + std::abs(dense.imag()),
                  "case " + std::to_string(c));
  }
  return check.result;
}

CheckResult check_norm_preservation(const VerifyOptions& opts) {
  Check check("state-norm-preservation", 1e-12);
  std::uint64_t mixer = opts.seed ^ 0x2222;
  for (int c = 0; c < 20; ++c) {
    auto spec = small_spec(mixer, 4, 4, 1);
    const auto tmpl = oracle::random_template(opts.seed + 11000 + std::uint64_t(c), spec);
    const auto x = oracle::random_input(opts.seed + 12000 + std::uint64_t(c), spec.input_bits);
    const auto theta =
        oracle::random_continuous_angles(opts.seed + 13000 + std::uint64_t(c), spec.num_parameters);
    const double norm = oracle::final_state_norm(tmpl, x, theta, opts.caps);
    check.observe(std::abs(norm - 1.0), "case " + std::to_string(c));
  }
  return check.result;
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  std::vector<CheckResult> out;
  out.push_back(check_stabilizer_vs_dense(opts));
  out.push_back(check_enumeration_vs_quadrature(opts));
  out.push_back(check_parameter_shift(opts));
  out.push_back(check_quadrature_bandlimit(opts));
  out.push_back(check_pauli_associativity(opts));
  out.push_back(check_tableau_invariants(opts));
  out.push_back(check_zero_state_expectation(opts));
  out.push_back(check_norm_preservation(opts));
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.passed; });
}

}  // namespace qntk::verify
